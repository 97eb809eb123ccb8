// config.cpp
#include "nzkk/config.hpp"

#include "nzkk/io.hpp"
#include "nzkk/kernel.hpp"
#include "nzkk/model.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nzkk {

namespace {

enum class KeyType { real, integer, text, list };

struct KeySpec {
    const char* key;
    KeyType type;
    const char* fallback;
    std::vector<std::string> choices;
};

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> keys = {
        {"run.experiment", KeyType::text, "", {}},
        {"run.output", KeyType::text, "", {}},
        {"run.seed", KeyType::integer, "1", {}},

        {"system.model", KeyType::text, "jc", {"jc", "spin-boson"}},
        {"system.omega0", KeyType::real, "1", {}},
        {"system.delta", KeyType::real, "1", {}},
        {"system.delta_quench", KeyType::real, "1.5", {}},

        {"bath.kind", KeyType::text, "single-mode", {"single-mode", "discrete", "drude-lorentz", "ohmic", "sub-ohmic"}},
        {"bath.omega_c", KeyType::real, "1", {}},
        {"bath.coupling", KeyType::real, "0.3", {}},
        {"bath.n_max", KeyType::integer, "10", {}},
        {"bath.modes", KeyType::integer, "1", {}},
        {"bath.beta", KeyType::real, "1", {}},
        {"bath.eta", KeyType::real, "0.1", {}},
        {"bath.lambda", KeyType::real, "0.25", {}},
        {"bath.gamma", KeyType::real, "5", {}},
        {"bath.exponent", KeyType::real, "0.5", {}},
        {"bath.placement", KeyType::text, "linear", {"linear", "logarithmic", "centroid", "equal-reorganization"}},
        {"bath.reference", KeyType::text, "vacuum", {"vacuum", "thermal"}},
        {"bath.matsubara", KeyType::integer, "4", {}},

        {"grid.dt", KeyType::real, "0.015", {}},
        {"grid.n_steps", KeyType::integer, "4000", {}},

        {"analysis.eps", KeyType::real, "0.3", {}},
        {"analysis.eps_list", KeyType::list, "0.3, 0.1", {}},
        {"analysis.window_lo", KeyType::real, "0.05", {}},
        {"analysis.window_hi", KeyType::real, "3", {}},
        {"analysis.floor_sizes", KeyType::list, "2, 3, 4", {}},
        {"analysis.refine_steps", KeyType::list, "4000, 8000, 16000", {}},
        {"analysis.refine_t_max", KeyType::real, "60", {}},
        {"analysis.volterra_rule", KeyType::text, "left", {"left", "trapezoid"}},
        {"analysis.hilbert", KeyType::text, "circular", {"circular", "tapered"}},
        {"analysis.theta", KeyType::real, "0.78539816339744828", {}},
        {"analysis.truncations", KeyType::list, "3, 5, 10", {}},
        {"analysis.couplings", KeyType::list, "0.1, 1.0, 2.0", {}},
        {"analysis.sb_couplings", KeyType::list, "0.1, 0.5, 1.0, 2.0", {}},
        {"analysis.sb_modes", KeyType::integer, "2", {}},
        {"analysis.sb_n_max", KeyType::integer, "2", {}},
        {"analysis.sb_mode_omega", KeyType::real, "1", {}},
        {"analysis.ibm_eps", KeyType::real, "0.05", {}},
        {"analysis.ibm_shift", KeyType::real, "0.5", {}},
        {"analysis.omega_max", KeyType::real, "100", {}},
        {"analysis.n_omega", KeyType::integer, "4001", {}},
        {"analysis.moment_order", KeyType::integer, "40", {}},
        {"analysis.vieta_trials", KeyType::integer, "100", {}},
        {"analysis.anchor_omega1", KeyType::real, "0.5", {}},
        {"analysis.anchor_omega2", KeyType::real, "1", {}},
        {"analysis.anchor_gamma", KeyType::real, "0.4", {}},
        {"analysis.anchor_r", KeyType::real, "0.2", {}},

        {"scan.re_lo", KeyType::real, "0", {}},
        {"scan.re_hi", KeyType::real, "3", {}},
        {"scan.im_lo", KeyType::real, "-0.1", {}},
        {"scan.im_hi", KeyType::real, "0.6", {}},
        {"scan.nx", KeyType::integer, "100", {}},
        {"scan.ny", KeyType::integer, "60", {}},
        {"scan.g_lo", KeyType::real, "0.1", {}},
        {"scan.g_hi", KeyType::real, "2", {}},
        {"scan.g_step", KeyType::real, "0.1", {}},
        {"scan.anchor_couplings", KeyType::list, "0.1, 0.3, 1.0", {}},
    };
    return keys;
}

const KeySpec* find_key(const std::string& k) {
    for (const auto& s : key_table())
        if (k == s.key) return &s;
    return nullptr;
}

using Overrides = std::map<std::string, std::string>;

const std::map<std::string, Overrides>& preset_overrides() {
    static const std::map<std::string, Overrides> m = {
        {"qlq-tables", {{"bath.beta", "1"}}},
        {"fig-zeros", {{"bath.n_max", "6"}, {"bath.reference", "thermal"}, {"bath.beta", "1"}}},
        {"fig-jc-kk", {{"bath.n_max", "10"}, {"bath.coupling", "0.3"}}},
        {"fig-ibm",
         {{"bath.kind", "drude-lorentz"}, {"bath.lambda", "0.25"}, {"bath.gamma", "5"}, {"analysis.omega_max", "20"}}},
        {"fig-fp",
         {{"bath.kind", "drude-lorentz"},
          {"bath.lambda", "0.25"},
          {"bath.gamma", "5"},
          {"bath.eta", "0.1"},
          {"bath.omega_c", "5"},
          {"bath.exponent", "0.5"}}},
        {"fig-counter",
         {{"system.model", "spin-boson"},
          {"bath.kind", "ohmic"},
          {"bath.eta", "0.1"},
          {"bath.omega_c", "5"},
          {"bath.modes", "4"},
          {"bath.n_max", "2"},
          {"bath.reference", "thermal"},
          {"grid.dt", "0.01"},
          {"grid.n_steps", "3000"}}},
        {"fig-matrix-kk", {{"bath.n_max", "10"}, {"bath.coupling", "0.3"}}},
        {"carleman-report", {{"bath.gamma", "5"}, {"bath.omega_c", "5"}}},
        {"anchor-report", {}},
    };
    return m;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_real(const std::string& s, double& out) {
    std::istringstream in(s);
    in >> out;
    return !in.fail() && in.eof() && std::isfinite(out);
}

bool parse_int(const std::string& s, long& out) {
    std::istringstream in(s);
    in >> out;
    return !in.fail() && in.eof();
}

bool parse_list(const std::string& s, std::vector<double>& out) {
    out.clear();
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        double v;
        if (!parse_real(trim(item), v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

void check_guards(const RunConfig& c, std::vector<std::string>& errors) {
    auto guard = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    guard(c.real("analysis.eps") >= 0.0, "laplace shift must be ≥ 0");
    for (double e : c.list("analysis.eps_list")) guard(e >= 0.0, "laplace shift must be ≥ 0");
    guard(c.real("grid.dt") > 0.0, "grid.dt must be > 0");
    guard(c.integer("grid.n_steps") >= 2, "grid.n_steps must be >= 2");
    guard(c.integer("bath.n_max") >= 1, "bath.n_max must be >= 1");
    guard(c.integer("bath.modes") >= 1, "bath.modes must be >= 1");
    guard(c.real("bath.beta") > 0.0, "bath.beta must be > 0");
    guard(c.real("bath.coupling") >= 0.0, "bath.coupling must be >= 0");
    guard(c.real("bath.omega_c") > 0.0, "bath.omega_c must be > 0");
    guard(c.real("bath.gamma") > 0.0, "bath.gamma must be > 0");
    guard(c.real("bath.lambda") >= 0.0, "bath.lambda must be >= 0");
    guard(c.real("bath.eta") >= 0.0, "bath.eta must be >= 0");
    guard(c.real("bath.exponent") > 0.0 && c.real("bath.exponent") < 1.0, "bath.exponent must lie in (0, 1)");
    guard(c.integer("bath.matsubara") >= 0, "bath.matsubara must be >= 0");
    guard(c.real("analysis.window_lo") >= 0.0 && c.real("analysis.window_lo") < c.real("analysis.window_hi"),
          "analysis window must satisfy 0 <= lo < hi");
    for (double m : c.list("analysis.floor_sizes"))
        guard(m >= 1 && m == std::floor(m), "analysis.floor_sizes entries must be positive integers");
    for (double n : c.list("analysis.refine_steps"))
        guard(n >= 2 && n == std::floor(n), "analysis.refine_steps entries must be integers >= 2");
    guard(c.real("analysis.refine_t_max") > 0.0, "analysis.refine_t_max must be > 0");
    guard(c.integer("analysis.moment_order") >= 4, "analysis.moment_order must be >= 4");
    guard(c.integer("analysis.vieta_trials") >= 1, "analysis.vieta_trials must be >= 1");
    guard(c.integer("analysis.n_omega") >= 16, "analysis.n_omega must be >= 16");
    guard(c.real("analysis.omega_max") > 0.0, "analysis.omega_max must be > 0");
    guard(c.real("analysis.anchor_gamma") > 0.0 && c.real("analysis.anchor_r") > 0.0,
          "anchor gamma and r must be > 0");
    guard(c.real("scan.re_lo") < c.real("scan.re_hi") && c.real("scan.im_lo") < c.real("scan.im_hi"),
          "scan region is empty");
    guard(c.integer("scan.nx") >= 1 && c.integer("scan.ny") >= 1, "scan grid needs nx, ny >= 1");
    guard(c.real("scan.g_step") > 0.0 && c.real("scan.g_lo") <= c.real("scan.g_hi"), "scan coupling range invalid");
    for (double g : c.list("analysis.couplings")) guard(g >= 0.0, "couplings must be >= 0");
    for (double g : c.list("analysis.sb_couplings")) guard(g >= 0.0, "couplings must be >= 0");

    // QLQ cap d^2 <= 1764, i.e. JC N_max <= 20
    for (double n : c.list("analysis.truncations")) {
        const double d = 2.0 * (n + 1.0);
        if (n < 1 || n != std::floor(n))
            errors.push_back("analysis.truncations entries must be integers >= 1");
        else if (d * d > 1764.0) {
            std::ostringstream os;
            os << "JC truncation N_max = " << n << " gives QLQ dimension " << d * d << " above cap 1764";
            errors.push_back(os.str());
        }
    }
    auto sb_dim = [&](long modes, long n_max) {
        try {
            spin_boson_dimension(static_cast<int>(modes), static_cast<int>(n_max), 4096);
        } catch (const Error& e) {
            errors.push_back(e.what());
        }
    };
    if (c.text("system.model") == "spin-boson" && c.integer("bath.modes") >= 1 && c.integer("bath.n_max") >= 1)
        sb_dim(c.integer("bath.modes"), c.integer("bath.n_max"));
    if (c.experiment == "qlq-tables") {
        guard(c.integer("analysis.sb_modes") >= 1 && c.integer("analysis.sb_n_max") >= 1,
              "analysis.sb_modes and analysis.sb_n_max must be >= 1");
        if (c.integer("analysis.sb_modes") >= 1 && c.integer("analysis.sb_n_max") >= 1)
            sb_dim(c.integer("analysis.sb_modes"), c.integer("analysis.sb_n_max"));
    }
}

}  // namespace

const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> p = {
        {"qlq-tables", "QLQ spectra for JC and spin-boson truncations (reality, nonhermiticity)"},
        {"fig-zeros", "zero scans of population and coherence transforms over a coupling sweep"},
        {"fig-jc-kk", "scalar effective-kernel KK residuals, factorized vs correlated JC"},
        {"fig-ibm", "IBM self-consistency with a Hilbert-paired perturbation"},
        {"fig-fp", "bath-correlator pole KK, passivity and sub-Ohmic Born slice"},
        {"fig-counter", "spin-boson correlated quench: Born residual proxy and near-zero peaks"},
        {"fig-matrix-kk", "4x4 JC memory kernel extraction and matrix KK against the noise floor"},
        {"carleman-report", "Carleman growth classification of bath moment sequences"},
        {"anchor-report", "analytic zero anchor and rational-kernel pole budget"},
    };
    return p;
}

bool is_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return true;
    return false;
}

const std::string& RunConfig::text(const std::string& key) const {
    const auto it = values.find(key);
    require(it != values.end(), ErrorKind::validation, "unknown config key " + key);
    return it->second;
}

double RunConfig::real(const std::string& key) const {
    double v;
    require(parse_real(text(key), v), ErrorKind::validation, key + " is not a number");
    return v;
}

long RunConfig::integer(const std::string& key) const {
    long v;
    require(parse_int(text(key), v), ErrorKind::validation, key + " is not an integer");
    return v;
}

std::vector<double> RunConfig::list(const std::string& key) const {
    std::vector<double> v;
    require(parse_list(text(key), v), ErrorKind::validation, key + " is not a number list");
    return v;
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    std::string section;
    for (const auto& [k, v] : values) {
        const auto dot = k.find('.');
        const std::string s = k.substr(0, dot);
        if (s != section) {
            if (!section.empty()) os << '\n';
            os << '[' << s << "]\n";
            section = s;
        }
        os << k.substr(dot + 1) << " = " << v << '\n';
    }
    return os.str();
}

std::string RunConfig::hash() const { return sha256_hex(echo()); }

ConfigResult validate_config(const std::string& raw) {
    ConfigResult res;
    // '#' comments are accepted in addition to ';'
    std::ostringstream cleaned;
    {
        std::istringstream in(raw);
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            cleaned << (t.rfind('#', 0) == 0 ? std::string() : line) << '\n';
        }
    }
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(cleaned.str());
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        res.errors.push_back(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
        return res;
    }
    std::map<std::string, std::string> given;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            res.errors.push_back("key '" + section + "' must sit inside a section");
            continue;
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (!find_key(full))
                res.errors.push_back("unknown key '" + full + "'");
            else
                given[full] = trim(value.data());
        }
    }
    const auto exp = given.find("run.experiment");
    if (exp == given.end() || exp->second.empty()) res.errors.push_back("missing required key run.experiment");
    const auto out = given.find("run.output");
    if (out == given.end() || out->second.empty()) res.errors.push_back("missing required key run.output");
    if (exp != given.end() && !exp->second.empty() && !is_preset(exp->second))
        res.errors.push_back("unknown experiment '" + exp->second + "'");
    if (!res.errors.empty()) return res;

    RunConfig c;
    c.experiment = exp->second;
    c.output = out->second;
    for (const auto& k : key_table()) c.values[k.key] = k.fallback;
    for (const auto& [k, v] : preset_overrides().at(c.experiment)) c.values[k] = v;
    for (const auto& [k, v] : given) c.values[k] = v;

    for (const auto& k : key_table()) {
        const std::string& v = c.values[k.key];
        double d;
        long l;
        std::vector<double> lst;
        switch (k.type) {
            case KeyType::real:
                if (!parse_real(v, d)) res.errors.push_back(std::string(k.key) + " must be a number, got '" + v + "'");
                break;
            case KeyType::integer:
                if (!parse_int(v, l)) res.errors.push_back(std::string(k.key) + " must be an integer, got '" + v + "'");
                break;
            case KeyType::list:
                if (!parse_list(v, lst))
                    res.errors.push_back(std::string(k.key) + " must be a comma-separated number list, got '" + v + "'");
                break;
            case KeyType::text:
                if (!k.choices.empty() && std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
                    std::string msg = std::string(k.key) + " must be one of";
                    for (const auto& ch : k.choices) msg += " " + ch;
                    res.errors.push_back(msg + ", got '" + v + "'");
                }
                break;
        }
    }
    if (!res.errors.empty()) return res;
    long seed = 0;
    parse_int(c.values["run.seed"], seed);
    if (seed < 0) res.errors.push_back("run.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    check_guards(c, res.errors);
    if (!res.errors.empty()) return res;
    res.config = std::move(c);
    return res;
}

std::string preset_ini(const std::string& name, const std::filesystem::path& output) {
    require(is_preset(name), ErrorKind::validation, "unknown preset '" + name + "'");
    std::ostringstream os;
    os << "[run]\nexperiment = " << name << "\noutput = " << output.string() << '\n';
    std::string section = "run";
    for (const auto& [k, v] : preset_overrides().at(name)) {
        const auto dot = k.find('.');
        const std::string s = k.substr(0, dot);
        if (s != section) {
            os << "\n[" << s << "]\n";
            section = s;
        }
        os << k.substr(dot + 1) << " = " << v << '\n';
    }
    return os.str();
}

RunConfig preset_config(const std::string& name, const std::filesystem::path& output) {
    auto res = validate_config(preset_ini(name, output));
    if (!res.ok()) {
        std::string msg = "preset " + name + " failed validation:";
        for (const auto& e : res.errors) msg += " " + e;
        fail(ErrorKind::validation, msg);
    }
    return *res.config;
}

}  // namespace nzkk
