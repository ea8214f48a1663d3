#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mldrive/config.hpp"

namespace mldrive::scenario {

inline constexpr const char* kModuleVersions[][2] = {
    {"plant", "1.0"},        {"modulation", "1.0"},  {"inverter", "1.0"}, {"control", "1.0"},
    {"current_loop", "1.0"}, {"analysis", "1.0"},    {"cli", "1.0"},
};

struct RunReport {
  std::vector<std::string> files;  // relative to the output directory, in write order
  std::vector<std::string> lines;  // human-readable summary
};

// Runs cfg.mode and writes every artifact plus manifest.txt into
// cfg.output_dir. config_hash identifies the source text in the manifest.
RunReport run_scenario(const config::ScenarioConfig& cfg, std::uint64_t config_hash);

}  // namespace mldrive::scenario
