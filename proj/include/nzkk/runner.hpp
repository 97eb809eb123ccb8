// runner.hpp: run_experiment, manifests and exit codes
#pragma once

#include "nzkk/config.hpp"
#include "nzkk/pipelines.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nzkk {

inline constexpr const char* artifact_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_stage = 2, exit_acceptance = 3 };

struct FileEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string experiment;
    std::string config_hash;
    std::string version = artifact_version;
    std::string started;
    std::string finished;
    std::vector<StageTime> stages;
    std::vector<FileEntry> files;
    std::vector<Check> checks;
    std::string failed_stage;  // empty unless a stage threw
    std::string error;
    int exit_code = exit_ok;

    bool all_passed() const;
    // JSON text; timestamps and wall times are the only nondeterministic fields.
    std::string json() const;
};

// Runs the preset pipeline, writes effective.ini, every stage output and manifest.json.
// Stage failures are caught and recorded; partial outputs stay on disk.
RunManifest run_experiment(const RunConfig& cfg);

}  // namespace nzkk
