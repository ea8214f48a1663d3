#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "mldrive/controller.hpp"
#include "mldrive/simulation.hpp"

namespace mldrive::config {

// Line-oriented `key = value` text grouped by `[section]` headers. `#` and
// `;` start comments. Keys are addressed as "section.key".
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(std::string_view text);
  static KeyValueFile read(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.contains(key); }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& text() const { return text_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string text_;
};

enum class Mode { OpenLoopSPWM, ClosedLoopDrive, TrainController, Table1Sweep };
enum class ControllerKind { PI, NeuroFuzzy };

std::string_view to_string(Mode m);
std::string_view to_string(ControllerKind k);

struct AnalysisConfig {
  int n_harmonics = 100;
  int periods = 2;  // fundamental periods analysed in open-loop studies
  int samples_per_carrier = 400;
};

struct ScenarioConfig {
  Mode mode = Mode::OpenLoopSPWM;
  double duration = 0.0;  // s, 0 selects the mode default
  double dt = 0.0;        // s, 0 selects 1 / (f_c * samples_per_carrier)
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  sim::DriveConfig drive;  // plant, modulation, inverter, current loop
  control::NeuroFuzzyConfig neuro_fuzzy;
  sim::TrainingConfig training;
  ControllerKind controller = ControllerKind::NeuroFuzzy;
  std::string ann1_path;
  std::string ann2_path;
  std::string supervisor_path;
  AnalysisConfig analysis;
};

// Every key is optional and falls back to the defaults above. Unknown keys,
// malformed values and failed validation raise ConfigurationError naming
// the line.
ScenarioConfig from_file(const KeyValueFile& file);

void validate(const ScenarioConfig& cfg);

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view data);

}  // namespace mldrive::config
