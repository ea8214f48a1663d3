#include "mldrive/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "mldrive/errors.hpp"

namespace mldrive::config {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigurationError(fmt::format("line {}: {}", line, what));
}

double to_double(const KeyValueFile::Entry& e, const std::string& key) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e.line, fmt::format("{} expects a number, got '{}'", key, e.value));
  return v;
}

long long to_integer(const KeyValueFile::Entry& e, const std::string& key) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e.line, fmt::format("{} expects an integer, got '{}'", key, e.value));
  return v;
}

std::size_t to_count(const KeyValueFile::Entry& e, const std::string& key) {
  const long long v = to_integer(e, key);
  if (v < 0) fail(e.line, fmt::format("{} must be non-negative", key));
  return static_cast<std::size_t>(v);
}

Mode parse_mode(const KeyValueFile::Entry& e) {
  const std::string v = upper(e.value);
  for (auto m : {Mode::OpenLoopSPWM, Mode::ClosedLoopDrive, Mode::TrainController,
                 Mode::Table1Sweep}) {
    if (v == to_string(m)) return m;
  }
  fail(e.line, fmt::format(
                   "unknown mode '{}' (OPEN_LOOP_SPWM|CLOSED_LOOP_DRIVE|TRAIN_CONTROLLER|TABLE1_SWEEP)",
                   e.value));
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  file.text_ = std::string(text);
  std::istringstream in(file.text_);
  std::string section;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    const std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, fmt::format("expected `key = value`, got '{}'", line));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key");
    if (section.empty()) fail(line_no, fmt::format("key '{}' appears before any [section]", key));
    const std::string full = section + "." + key;
    if (file.entries_.contains(full)) {
      fail(line_no, fmt::format("duplicate key '{}' (first on line {})", full,
                                file.entries_.at(full).line));
    }
    file.entries_[full] = {value, line_no};
  }
  return file;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::OpenLoopSPWM: return "OPEN_LOOP_SPWM";
    case Mode::ClosedLoopDrive: return "CLOSED_LOOP_DRIVE";
    case Mode::TrainController: return "TRAIN_CONTROLLER";
    case Mode::Table1Sweep: return "TABLE1_SWEEP";
  }
  return "?";
}

std::string_view to_string(ControllerKind k) {
  return k == ControllerKind::PI ? "PI" : "NEUROFUZZY";
}

ScenarioConfig from_file(const KeyValueFile& file) {
  ScenarioConfig cfg;
  auto& drive = cfg.drive;
  auto& motor = drive.motor;
  auto& mod = drive.modulation;
  auto& nf = cfg.neuro_fuzzy;
  auto& sup = nf.supervisor;
  auto& tr = cfg.training;

  using Binder = std::function<void(const KeyValueFile::Entry&, const std::string&)>;
  auto real = [](double& target) {
    return Binder([&target](const auto& e, const auto& k) { target = to_double(e, k); });
  };
  auto count = [](std::size_t& target) {
    return Binder([&target](const auto& e, const auto& k) { target = to_count(e, k); });
  };
  auto integer = [](int& target) {
    return Binder([&target](const auto& e, const auto& k) {
      target = static_cast<int>(to_integer(e, k));
    });
  };
  auto text = [](std::string& target) {
    return Binder([&target](const auto& e, const auto&) { target = e.value; });
  };

  const std::map<std::string, Binder> binders{
      {"scenario.mode", [&](const auto& e, const auto&) { cfg.mode = parse_mode(e); }},
      {"scenario.duration", real(cfg.duration)},
      {"scenario.dt", real(cfg.dt)},
      {"scenario.seed",
       [&](const auto& e, const auto& k) {
         const long long v = to_integer(e, k);
         if (v < 0) fail(e.line, "seed must be non-negative");
         cfg.seed = static_cast<std::uint64_t>(v);
       }},
      {"scenario.output_dir", text(cfg.output_dir)},

      {"plant.r_total", real(motor.r_total)},
      {"plant.l_total", real(motor.l_total)},
      {"plant.k_m", real(motor.k_m)},
      {"plant.k_t_amp", real(motor.k_t_amp)},
      {"plant.j_inertia", real(motor.j_inertia)},
      {"plant.b_friction", real(motor.b_friction)},
      {"plant.torque_model",
       [&](const auto& e, const auto&) {
         const std::string v = upper(e.value);
         if (v == "SERIES_QUADRATIC") {
           motor.torque_model = plant::TorqueModel::SeriesQuadratic;
         } else if (v == "AMPLITUDE_LINEAR") {
           motor.torque_model = plant::TorqueModel::AmplitudeLinear;
         } else {
           fail(e.line, "torque_model must be SERIES_QUADRATIC or AMPLITUDE_LINEAR");
         }
       }},

      {"modulation.levels_m",
       [&](const auto& e, const auto& k) {
         mod.levels_m = static_cast<int>(to_integer(e, k));
         drive.inverter.levels_m = mod.levels_m;
       }},
      {"modulation.f_c", real(mod.f_c)},
      {"modulation.f_m", real(mod.f_m)},
      {"modulation.m_a", real(mod.m_a)},
      {"modulation.v_m", real(mod.v_m)},
      {"modulation.v_c", real(mod.v_c)},
      {"modulation.carrier_phase", real(mod.carrier_phase)},
      {"modulation.crossing_refinements", integer(mod.crossing_refinements)},
      {"modulation.disposition",
       [&](const auto& e, const auto&) {
         try {
           mod.disposition = modulation::parse_disposition(upper(e.value));
         } catch (const ConfigurationError& err) {
           fail(e.line, err.what());
         }
       }},
      {"modulation.sampling",
       [&](const auto& e, const auto&) {
         try {
           mod.sampling = modulation::parse_sampling(upper(e.value));
         } catch (const ConfigurationError& err) {
           fail(e.line, err.what());
         }
       }},

      {"inverter.v_dc_total", real(drive.inverter.v_dc_total)},

      {"current_loop.kp_i", real(drive.current_gains.kp)},
      {"current_loop.ki_i", real(drive.current_gains.ki)},
      {"current_loop.tau_imax", real(drive.tau_imax)},
      {"current_loop.i_limit", real(drive.i_limit)},

      {"drive.w_ref", real(drive.w_ref)},
      {"drive.load_quadratic", real(drive.load_quadratic)},
      {"drive.load_step", real(drive.load_step)},
      {"drive.load_step_time", real(drive.load_step_time)},
      {"drive.steps_per_carrier", integer(drive.steps_per_carrier)},
      {"drive.settle_window", real(drive.settle_window)},
      {"drive.trajectory_stride", count(drive.trajectory_stride)},

      {"control.controller",
       [&](const auto& e, const auto&) {
         const std::string v = upper(e.value);
         if (v == "PI") {
           cfg.controller = ControllerKind::PI;
         } else if (v == "NEUROFUZZY") {
           cfg.controller = ControllerKind::NeuroFuzzy;
         } else {
           fail(e.line, "controller must be PI or NEUROFUZZY");
         }
       }},
      {"control.blend", real(nf.blend)},
      {"control.speed_scale", real(nf.scaling.speed)},
      {"control.voltage_scale", real(nf.scaling.voltage)},
      {"control.current_scale", real(nf.scaling.current)},
      {"control.fuzzy_sets", integer(sup.sets_per_input)},
      {"control.error_scale", real(sup.error_scale)},
      {"control.delta_scale", real(sup.delta_scale)},
      {"control.ki_step", real(sup.ki_step)},
      {"control.kp_step", real(sup.kp_step)},
      {"control.outer_gain", real(sup.outer_gain)},
      {"control.ann1_path", text(cfg.ann1_path)},
      {"control.ann2_path", text(cfg.ann2_path)},
      {"control.supervisor_path", text(cfg.supervisor_path)},

      {"training.speeds",
       [&](const auto& e, const auto& k) {
         tr.speeds.clear();
         std::istringstream list(e.value);
         for (std::string item; std::getline(list, item, ',');) {
           tr.speeds.push_back(to_double({trim(item), e.line}, k));
         }
       }},
      {"training.teacher_kp", real(tr.teacher_kp)},
      {"training.teacher_ki", real(tr.teacher_ki)},
      {"training.ann1_hidden", count(tr.ann1_hidden)},
      {"training.ann2_hidden", count(tr.ann2_hidden)},
      {"training.lr", real(tr.lr)},
      {"training.epochs", count(tr.epochs)},
      {"training.batch_size", count(tr.batch_size)},
      {"training.momentum", real(tr.momentum)},

      {"analysis.n_harmonics", integer(cfg.analysis.n_harmonics)},
      {"analysis.periods", integer(cfg.analysis.periods)},
      {"analysis.samples_per_carrier", integer(cfg.analysis.samples_per_carrier)},
  };

  for (const auto& [key, entry] : file.entries()) {
    auto it = binders.find(key);
    if (it == binders.end()) fail(entry.line, fmt::format("unknown key '{}'", key));
    it->second(entry, key);
  }
  cfg.training.seed = cfg.seed;

  try {
    validate(cfg);
  } catch (const ConfigurationError& err) {
    // point at the first key the message names
    const std::string what = err.what();
    for (const auto& [key, entry] : file.entries()) {
      const std::string name = key.substr(key.find('.') + 1);
      for (auto pos = what.find(name); pos != std::string::npos; pos = what.find(name, pos + 1)) {
        const auto word = [&](std::size_t i) {
          return i < what.size() && (std::isalnum(static_cast<unsigned char>(what[i])) || what[i] == '_');
        };
        if ((pos == 0 || !word(pos - 1)) && !word(pos + name.size())) fail(entry.line, what);
      }
    }
    throw;
  }
  return cfg;
}

void validate(const ScenarioConfig& cfg) {
  modulation::validate(cfg.drive.modulation);
  inverter::validate(cfg.drive.inverter);
  if (cfg.analysis.n_harmonics < 1 || cfg.analysis.periods < 2 ||
      cfg.analysis.samples_per_carrier < 20) {
    throw ConfigurationError(
        "analysis needs n_harmonics >= 1, periods >= 2 and samples_per_carrier >= 20");
  }
  if (cfg.dt < 0.0 || cfg.duration < 0.0) {
    throw ConfigurationError("dt and duration must be non-negative (0 selects the default)");
  }
  const auto& mod = cfg.drive.modulation;
  if (cfg.mode == Mode::OpenLoopSPWM || cfg.mode == Mode::Table1Sweep) {
    const double periods = cfg.duration > 0.0 ? cfg.duration * mod.f_m : cfg.analysis.periods;
    if (periods < 2.0 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-9) {
      throw ConfigurationError(fmt::format(
          "duration must span an integer number (>= 2) of reference periods, got {}", periods));
    }
    if (cfg.dt > 0.0) {
      const double per_period = 1.0 / (mod.f_m * cfg.dt);
      if (std::abs(per_period - std::round(per_period)) > 1e-6) {
        throw ConfigurationError("dt must divide the reference period into whole samples");
      }
    }
  }
  if (cfg.mode == Mode::ClosedLoopDrive || cfg.mode == Mode::TrainController) {
    sim::DriveConfig drive = cfg.drive;
    if (cfg.duration > 0.0) drive.duration = cfg.duration;
    if (cfg.dt > 0.0) {
      const double steps = 1.0 / (mod.f_c * cfg.dt);
      if (std::abs(steps - std::round(steps)) > 1e-6) {
        throw ConfigurationError("dt must divide the carrier period into whole plant steps");
      }
      drive.steps_per_carrier = static_cast<int>(std::lround(steps));
    }
    sim::validate(drive);
    if (!(cfg.training.lr > 0.0) || cfg.training.epochs == 0 || cfg.training.ann1_hidden == 0 ||
        cfg.training.ann2_hidden == 0 || cfg.training.speeds.empty()) {
      throw ConfigurationError("training needs lr > 0, epochs > 0, hidden sizes and speeds");
    }
    if (!(cfg.neuro_fuzzy.blend >= 0.0 && cfg.neuro_fuzzy.blend <= 1.0)) {
      throw ConfigurationError("control.blend must lie in [0, 1]");
    }
    const bool any_path =
        !cfg.ann1_path.empty() || !cfg.ann2_path.empty() || !cfg.supervisor_path.empty();
    const bool all_nets = !cfg.ann1_path.empty() && !cfg.ann2_path.empty();
    if (any_path && !all_nets) {
      throw ConfigurationError("ann1_path and ann2_path must be given together");
    }
  }
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace mldrive::config
