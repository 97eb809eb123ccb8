// config.hpp: INI run configs with strict keys, preset defaults and guards
#pragma once

#include "nzkk/core.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nzkk {

struct PresetInfo {
    std::string name;
    std::string summary;
};

const std::vector<PresetInfo>& presets();
bool is_preset(const std::string& name);

// Effective configuration: every known key is present, keyed "section.key".
struct RunConfig {
    std::string experiment;
    std::filesystem::path output;
    std::uint64_t seed = 1;
    std::map<std::string, std::string> values;

    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;

    // INI echo of the effective configuration, sorted by section and key.
    std::string echo() const;
    std::string hash() const;  // SHA-256 of echo()
};

struct ConfigResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value(); }
};

// Parses INI text. Unknown sections or keys, missing run.experiment / run.output and
// failed guards are all reported; nothing is partially accepted.
ConfigResult validate_config(const std::string& raw);

// Preset defaults with the given output directory; validated.
RunConfig preset_config(const std::string& name, const std::filesystem::path& output);

// INI text for a preset (what `nzkk preset` echoes into the output directory).
std::string preset_ini(const std::string& name, const std::filesystem::path& output);

}  // namespace nzkk
