// mldrive: scenario runner for the multilevel drive simulator.
//
//   mldrive run <config> [--output-dir DIR] [--seed N] [--quiet]
//
// Output directory precedence: --output-dir, then $MLDRIVE_OUTPUT_DIR, then
// scenario.output_dir from the config.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/config.hpp"
#include "mldrive/errors.hpp"
#include "mldrive/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// model paths in a config are relative to the config file
void anchor(std::string& path, const std::filesystem::path& base) {
  if (!path.empty() && std::filesystem::path(path).is_relative()) path = (base / path).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel SPWM motor-drive simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Scenario config (`[section]` / `key = value`)")
      ->required();
  run->add_option("--output-dir", output_dir, "Directory for generated files");
  auto* seed_opt = run->add_option("--seed", seed, "Override scenario.seed");
  run->add_flag("--quiet,-q", quiet, "Print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  namespace cfgns = mldrive::config;
  try {
    const auto file = cfgns::KeyValueFile::read(config_path);
    auto cfg = cfgns::from_file(file);
    if (*seed_opt) cfg.seed = seed;
    if (const char* env = std::getenv("MLDRIVE_OUTPUT_DIR"); env != nullptr && *env != '\0') {
      cfg.output_dir = env;
    }
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    const auto base = std::filesystem::path(config_path).parent_path();
    anchor(cfg.ann1_path, base);
    anchor(cfg.ann2_path, base);
    anchor(cfg.supervisor_path, base);

    const auto report = mldrive::scenario::run_scenario(cfg, cfgns::fnv1a(file.text()));
    if (!quiet) {
      fmt::print("{} -> {}\n", cfgns::to_string(cfg.mode), cfg.output_dir);
      for (const auto& line : report.lines) fmt::print("  {}\n", line);
      fmt::print("  wrote {} files\n", report.files.size());
    }
    return 0;
  } catch (const mldrive::ConfigurationError& e) {
    fmt::print(std::cerr, "config error in {}: {}\n", config_path, e.what());
    return kExitConfig;
  } catch (const mldrive::Error& e) {
    fmt::print(std::cerr, "numerical failure while running {}: {}\n", config_path, e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
}
