// runner.cpp
#include "nzkk/runner.hpp"

#include "nzkk/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>

namespace nzkk {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

bool RunManifest::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string RunManifest::json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["started"] = started;
    j["finished"] = finished;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) j["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"criterion", c.criterion}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    std::size_t passed = 0;
    for (const auto& c : checks) passed += c.pass ? 1 : 0;
    j["verdict"] = {{"passed", passed}, {"failed", checks.size() - passed}, {"all_passed", all_passed()}};
    if (!failed_stage.empty()) j["failed_stage"] = failed_stage;
    if (!error.empty()) j["error"] = error;
    j["exit_code"] = exit_code;
    return j.dump(2) + "\n";
}

RunManifest run_experiment(const RunConfig& cfg) {
    RunManifest m;
    m.experiment = cfg.experiment;
    m.config_hash = cfg.hash();
    m.started = utc_now();
    Sink sink(cfg.output);
    write_text(sink.file("effective.ini"), cfg.echo());
    try {
        m.checks = run_pipeline(cfg, sink);
        m.exit_code = m.all_passed() ? exit_ok : exit_acceptance;
    } catch (const StageError& e) {
        m.failed_stage = e.stage();
        m.error = e.what();
        m.exit_code = exit_stage;
    }
    m.finished = utc_now();
    m.stages = sink.stages();
    for (const auto& rel : sink.files()) {
        const auto p = sink.dir() / rel;
        if (!std::filesystem::exists(p)) continue;
        m.files.push_back({rel, sha256_file(p), std::filesystem::file_size(p)});
    }
    write_text(sink.dir() / "manifest.json", m.json());
    return m;
}

}  // namespace nzkk
