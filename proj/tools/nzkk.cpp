// nzkk: command-line front end for the preset pipelines
#include "nzkk/config.hpp"
#include "nzkk/io.hpp"
#include "nzkk/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace {

int report(const nzkk::RunManifest& m) {
    for (const auto& c : m.checks)
        std::printf("[%s] criterion %d: %s (%s)\n", c.pass ? "PASS" : "FAIL", c.criterion, c.name.c_str(),
                    c.detail.c_str());
    if (!m.failed_stage.empty()) std::fprintf(stderr, "nzkk: %s\n", m.error.c_str());
    for (const auto& s : m.stages) std::printf("stage %-16s %.3f s\n", s.name.c_str(), s.seconds);
    std::printf("%zu files recorded in manifest.json\n", m.files.size());
    return m.exit_code;
}

int load_and_run(const std::string& path, bool run) {
    std::string raw;
    try {
        raw = nzkk::read_text(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nzkk: %s\n", e.what());
        return nzkk::exit_validation;
    }
    const auto res = nzkk::validate_config(raw);
    if (!res.ok()) {
        for (const auto& e : res.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
        return nzkk::exit_validation;
    }
    if (!run) {
        std::cout << res.config->echo();
        return nzkk::exit_ok;
    }
    return report(nzkk::run_experiment(*res.config));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nzkk: memory-kernel extraction and analytic-structure audits"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a pipeline from a config file");
    run->add_option("config", config_path, "INI config")->required();

    std::string preset_name;
    std::string out_dir;
    auto* preset = app.add_subcommand("preset", "run a named preset with its defaults");
    preset->add_option("name", preset_name, "preset name")->required();
    preset->add_option("--out", out_dir, "output directory (default out/<name>)");

    auto* list = app.add_subcommand("list-presets", "list preset names");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config and print the effective values");
    validate->add_option("config", validate_path, "INI config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nzkk::exit_validation;
    }

    try {
        if (*list) {
            for (const auto& p : nzkk::presets()) std::printf("%-16s %s\n", p.name.c_str(), p.summary.c_str());
            return nzkk::exit_ok;
        }
        if (*validate) return load_and_run(validate_path, false);
        if (*run) return load_and_run(config_path, true);
        if (*preset) {
            if (!nzkk::is_preset(preset_name)) {
                std::fprintf(stderr, "error: unknown preset '%s' (see nzkk list-presets)\n", preset_name.c_str());
                return nzkk::exit_validation;
            }
            if (out_dir.empty()) out_dir = (std::filesystem::path("out") / preset_name).string();
            return report(nzkk::run_experiment(nzkk::preset_config(preset_name, out_dir)));
        }
    } catch (const nzkk::Error& e) {
        std::fprintf(stderr, "nzkk: %s\n", e.what());
        return nzkk::exit_validation;
    }
    return nzkk::exit_ok;
}
