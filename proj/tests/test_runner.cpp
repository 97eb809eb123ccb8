#include "nzkk/config.hpp"
#include "nzkk/io.hpp"
#include "nzkk/runner.hpp"

#include <doctest.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace nzkk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nzkk_test_runner_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string evp_sha256(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &n, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int k = 0; k < n; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", md[k]);
        hex += buf;
    }
    return hex;
}

bool has_error(const ConfigResult& r, const std::string& needle) {
    return std::any_of(r.errors.begin(), r.errors.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

Mat random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> nd;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(nd(rng), nd(rng));
    return m;
}

bool bitwise_equal(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("config: guards, strict keys, missing fields") {
    const auto neg = validate_config("[run]\nexperiment = fig-jc-kk\noutput = out\n[analysis]\neps = -0.1\n");
    CHECK_FALSE(neg.ok());
    CHECK(std::find(neg.errors.begin(), neg.errors.end(), "laplace shift must be ≥ 0") != neg.errors.end());

    const auto empty = validate_config("");
    CHECK_FALSE(empty.ok());
    CHECK(has_error(empty, "run.experiment"));
    CHECK(has_error(empty, "run.output"));

    const auto unknown = validate_config("[run]\nexperiment = fig-ibm\noutput = out\n[grid]\nsteps = 10\n");
    CHECK_FALSE(unknown.ok());
    CHECK(has_error(unknown, "unknown key 'grid.steps'"));

    CHECK(has_error(validate_config("[run]\nexperiment = fig-42\noutput = out\n"), "unknown experiment"));
    CHECK(has_error(validate_config("[run]\nexperiment = fig-ibm\noutput = out\n[grid]\ndt = fast\n"),
                    "grid.dt must be a number"));
}

TEST_CASE("config: JC parameters accepted with defaults; spin-boson cap") {
    const auto jc = validate_config("[run]\nexperiment = fig-jc-kk\noutput = out\n[bath]\nn_max = 10\ncoupling = 0.3\n");
    REQUIRE(jc.ok());
    const auto& c = *jc.config;
    CHECK(c.integer("bath.n_max") == 10);
    CHECK(c.real("bath.coupling") == 0.3);
    CHECK(c.real("system.omega0") == 1.0);
    CHECK(c.real("bath.omega_c") == 1.0);
    CHECK(c.seed == 1);

    const auto sb = validate_config(
        "[run]\nexperiment = fig-counter\noutput = out\n[system]\nmodel = spin-boson\n[bath]\nmodes = 12\nn_max = 3\n");
    CHECK_FALSE(sb.ok());
    CHECK(has_error(sb, "spin-boson dimension 33554432"));

    const auto qlq = validate_config("[run]\nexperiment = qlq-tables\noutput = out\n[analysis]\ntruncations = 3, 25\n");
    CHECK(has_error(qlq, "QLQ dimension 2704"));
}

TEST_CASE("config: echo round trip and presets") {
    for (const auto& p : presets()) {
        CHECK(is_preset(p.name));
        const auto cfg = preset_config(p.name, "out/" + p.name);
        const auto again = validate_config(cfg.echo());
        REQUIRE(again.ok());
        CHECK(again.config->hash() == cfg.hash());
        CHECK(cfg.hash() == evp_sha256(cfg.echo()));
        const auto from_ini = validate_config(preset_ini(p.name, "out/" + p.name));
        REQUIRE(from_ini.ok());
        CHECK(from_ini.config->hash() == cfg.hash());
    }
    CHECK(presets().size() == 9);
}

TEST_CASE("io: binary matrix and series round trips") {
    const auto dir = scratch("io");
    std::mt19937_64 rng(99);
    const Mat m = random_matrix(rng, 3, 5);
    write_matrix(dir / "m.bin", m);
    CHECK(bitwise_equal(read_matrix(dir / "m.bin"), m));

    const std::string raw = slurp(dir / "m.bin");
    REQUIRE(raw.size() == 16 + 16 * 15);
    CHECK(raw.substr(0, 8) == "NZKKMAT1");
    std::uint32_t rows = 0, cols = 0;
    std::memcpy(&rows, raw.data() + 8, 4);
    std::memcpy(&cols, raw.data() + 12, 4);
    CHECK(rows == 3);
    CHECK(cols == 5);
    double first[2];
    std::memcpy(first, raw.data() + 16, 16);
    CHECK(first[0] == m(0, 0).real());
    CHECK(first[1] == m(0, 0).imag());
    double second[2];
    std::memcpy(second, raw.data() + 32, 16);
    CHECK(second[0] == m(0, 1).real());  // row-major

    const TimeGrid grid{0.015, 7};
    std::vector<Mat> vals;
    for (int n = 0; n < 7; ++n) vals.push_back(random_matrix(rng, 2, 2));
    write_matrix_series(dir / "s.bin", grid, vals);
    const auto back = read_matrix_series(dir / "s.bin");
    CHECK(back.grid == grid);
    REQUIRE(back.values.size() == vals.size());
    for (std::size_t n = 0; n < vals.size(); ++n) CHECK(bitwise_equal(back.values[n], vals[n]));
    CHECK(slurp(dir / "s.bin").substr(0, 8) == "NZKKTRJ1");

    std::ofstream(dir / "bad.bin", std::ios::binary) << "NOTAMAT1xxxxxxxx";
    CHECK_THROWS_AS(read_matrix(dir / "bad.bin"), Error);
}

TEST_CASE("io: full-precision CSV, KK report header, zero CSV") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CsvWriter w({"a", "b"});
    w.cell(2.0 / 3.0).cell("x");
    w.end_row();
    CHECK(w.str() == "a,b\n0.66666666666666663,x\n");

    const auto dir = scratch("reports");
    const auto omega = uniform_grid(-20.0, 20.0, 1024);
    std::vector<cplx> v;
    for (double x : omega) v.push_back(I / (x - cplx(1.0, -0.5)));
    const auto rep = kk_residual(LaplaceSlice::from_scalar(omega, 0.3, v, "pole"), 0.05, 3.0, 0.05);
    write_kk_report(dir / "kk.txt", rep);
    const auto hdr = read_report_header(dir / "kk.txt");
    REQUIRE(hdr.count("verdict"));
    CHECK(hdr.at("verdict") == rep.verdict);
    REQUIRE(hdr.count("integrated_relative"));
    CHECK(std::stod(hdr.at("integrated_relative")) == rep.integrated_relative);

    ZeroScanResult s;
    s.coupling = 0.3;
    s.channel = "ee";
    s.zeros.push_back({cplx(0.1, 0.2), 1e-12});
    write_zero_csv(dir / "z.csv", {s});
    const std::string csv = slurp(dir / "z.csv");
    CHECK(csv.rfind("g,re,im,residual,channel\n", 0) == 0);
    CHECK(csv.find("0.29999999999999999,0.10000000000000001,0.20000000000000001") != std::string::npos);
}

TEST_CASE("runs are deterministic and every file is in the manifest") {
    auto strip = [](nlohmann::json j) {
        j.erase("started");
        j.erase("finished");
        for (auto& s : j["stages"]) s.erase("seconds");
        return j;
    };
    for (const std::string name : {"carleman-report", "fig-ibm"}) {
        const auto cfg = preset_config(name, scratch(name));
        const auto a = run_experiment(cfg);
        const auto ja = nlohmann::json::parse(slurp(cfg.output / "manifest.json"));
        CHECK(a.exit_code == exit_ok);
        CHECK(a.files.size() >= 2);
        for (const auto& f : a.files) {
            CHECK(f.sha256 == evp_sha256(slurp(cfg.output / f.path)));
            CHECK(f.bytes == fs::file_size(cfg.output / f.path));
        }
        // every file on disk except the manifest itself is listed
        std::size_t on_disk = 0;
        for (const auto& e : fs::recursive_directory_iterator(cfg.output))
            if (e.is_regular_file() && e.path().filename() != "manifest.json") ++on_disk;
        CHECK(on_disk == a.files.size());
        CHECK(ja["version"] == artifact_version);
        CHECK(ja["verdict"]["all_passed"] == true);

        fs::remove_all(cfg.output);
        const auto b = run_experiment(cfg);
        CHECK(a.config_hash == b.config_hash);
        REQUIRE(a.files.size() == b.files.size());
        for (std::size_t k = 0; k < a.files.size(); ++k) {
            CHECK(a.files[k].path == b.files[k].path);
            CHECK(a.files[k].sha256 == b.files[k].sha256);
        }
        CHECK(strip(ja) == strip(nlohmann::json::parse(slurp(cfg.output / "manifest.json"))));
    }
}

TEST_CASE("exit codes: stage failure keeps partial outputs; failed check gives 3") {
    const auto dir = scratch("stage");
    const auto parsed = validate_config("[run]\nexperiment = fig-matrix-kk\noutput = " + dir.string() +
                                        "\n[grid]\nn_steps = 3\n[analysis]\nrefine_steps = 4, 6\n");
    REQUIRE(parsed.ok());
    const auto m = run_experiment(*parsed.config);
    CHECK(m.exit_code == exit_stage);
    CHECK(m.failed_stage == "extraction");
    CHECK_FALSE(m.error.empty());
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "effective.ini"));
    CHECK(m.files.size() >= 2);

    const auto fp = run_experiment(preset_config("fig-fp", scratch("fp")));
    CHECK(fp.exit_code == exit_acceptance);
    CHECK_FALSE(fp.all_passed());
}
