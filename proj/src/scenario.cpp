#include "mldrive/scenario.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/analysis.hpp"
#include "mldrive/errors.hpp"
#include "mldrive/inverter.hpp"
#include "mldrive/modulation.hpp"

namespace mldrive::scenario {

namespace fs = std::filesystem;

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw ConfigurationError(
          fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
    }
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buffer;
    body(buffer);
    const std::string data = buffer.str();
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", (dir_ / name).string()));
    entries_.push_back({name, data.size(), config::fnv1a(data)});
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  void manifest(const config::ScenarioConfig& cfg, std::uint64_t config_hash) {
    const auto listed = entries_;
    write("manifest.txt", [&](std::ostream& out) {
      out << "mldrive manifest v1\n";
      fmt::print(out, "config_fnv1a {:016x}\n", config_hash);
      fmt::print(out, "mode {}\n", config::to_string(cfg.mode));
      fmt::print(out, "seed {}\n", cfg.seed);
      for (const auto& mv : kModuleVersions) fmt::print(out, "module {} {}\n", mv[0], mv[1]);
      for (const auto& e : listed) {
        fmt::print(out, "file {} {} {:016x}\n", e.name, e.bytes, e.hash);
      }
    });
  }

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::uint64_t hash;
  };
  fs::path dir_;
  std::vector<Entry> entries_;
};

struct OpenLoopResult {
  modulation::LevelSeries levels;
  Waveform voltage;
  analysis::Spectrum spectrum;
  double lag = 0.0;
};

double analysis_duration(const config::ScenarioConfig& cfg) {
  return cfg.duration > 0.0 ? cfg.duration : cfg.analysis.periods / cfg.drive.modulation.f_m;
}

double analysis_dt(const config::ScenarioConfig& cfg) {
  return cfg.dt > 0.0 ? cfg.dt
                      : 1.0 / (cfg.drive.modulation.f_c * cfg.analysis.samples_per_carrier);
}

OpenLoopResult open_loop(const modulation::ModulationConfig& mod,
                         const inverter::InverterConfig& inv, const config::ScenarioConfig& cfg) {
  OpenLoopResult r;
  r.levels = modulation::generate_levels(mod, analysis_duration(cfg), analysis_dt(cfg));
  r.voltage = inverter::synthesize_voltage(r.levels, inv);
  r.spectrum = analysis::spectrum_of(r.voltage, mod.f_m, cfg.analysis.n_harmonics);

  Waveform reference{r.voltage.dt, std::vector<double>(r.voltage.size())};
  for (std::size_t n = 0; n < reference.size(); ++n) {
    reference.samples[n] = modulation::reference_value(reference.time_at(n), mod);
  }
  r.lag = analysis::fundamental_phase_lag(r.voltage, reference, mod.f_m);
  return r;
}

std::string method_name(const modulation::ModulationConfig& mod) {
  return fmt::format("{}/{}", modulation::to_string(mod.disposition),
                     modulation::to_string(mod.sampling));
}

void run_open_loop(const config::ScenarioConfig& cfg, ArtifactWriter& out, RunReport& report) {
  const auto& mod = cfg.drive.modulation;
  const auto r = open_loop(mod, cfg.drive.inverter, cfg);
  const analysis::SummaryRow row{method_name(mod), r.spectrum.thd_pct, r.lag};

  out.write("levels.csv", [&](std::ostream& o) { modulation::write_levels_csv(o, r.levels); });
  out.write("voltage.csv", [&](std::ostream& o) { inverter::write_waveform_csv(o, r.voltage); });
  out.write("spectrum.csv", [&](std::ostream& o) { analysis::write_spectrum_csv(o, r.spectrum); });
  out.write("summary.csv", [&](std::ostream& o) { analysis::write_summary_csv(o, {row}); });
  report.lines.push_back(fmt::format("{}: THD {:.3f} %, fundamental lag {:.5f} rad", row.method,
                                     row.thd_pct, row.phase_lag_rad));
}

void run_table1(const config::ScenarioConfig& cfg, ArtifactWriter& out, RunReport& report) {
  using modulation::Disposition;
  constexpr std::array<std::pair<Disposition, double>, 4> rows{{
      {Disposition::PH, 21.96},
      {Disposition::PO, 21.85},
      {Disposition::APO, 21.89},
      {Disposition::Shift90, 21.28},
  }};

  std::vector<std::future<OpenLoopResult>> jobs;
  for (const auto& [disposition, published] : rows) {
    auto mod = cfg.drive.modulation;
    mod.disposition = disposition;
    jobs.push_back(std::async(std::launch::async, [mod, &cfg] {
      return open_loop(mod, cfg.drive.inverter, cfg);
    }));
  }

  std::vector<OpenLoopResult> results;
  for (auto& job : jobs) results.push_back(job.get());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string tag(modulation::to_string(rows[i].first));
    out.write(fmt::format("voltage_{}.csv", tag),
              [&](std::ostream& o) { inverter::write_waveform_csv(o, results[i].voltage); });
    out.write(fmt::format("spectrum_{}.csv", tag),
              [&](std::ostream& o) { analysis::write_spectrum_csv(o, results[i].spectrum); });
  }
  out.write("table1.csv", [&](std::ostream& o) {
    o << "method,thd_pct,phase_lag_rad,published_thd_pct\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      fmt::print(o, "{},{:.6f},{:.9f},{:.2f}\n", modulation::to_string(rows[i].first),
                 results[i].spectrum.thd_pct, results[i].lag, rows[i].second);
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    report.lines.push_back(fmt::format("{:<8} THD {:7.3f} %   (published {:.2f} %)",
                                       modulation::to_string(rows[i].first),
                                       results[i].spectrum.thd_pct, rows[i].second));
  }
}

sim::DriveConfig drive_config(const config::ScenarioConfig& cfg) {
  sim::DriveConfig drive = cfg.drive;
  if (cfg.duration > 0.0) drive.duration = cfg.duration;
  if (cfg.dt > 0.0) {
    drive.steps_per_carrier = static_cast<int>(std::lround(1.0 / (drive.modulation.f_c * cfg.dt)));
  }
  return drive;
}

sim::TrainingConfig training_config(const config::ScenarioConfig& cfg) {
  sim::TrainingConfig tc = cfg.training;
  tc.seed = cfg.seed;
  return tc;
}

template <typename T, typename Loader>
T load_model(const std::string& path, Loader loader) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError(fmt::format("cannot open model file '{}'", path));
  return loader(in);
}

void write_loss(ArtifactWriter& out, const std::string& name, const std::vector<double>& loss) {
  out.write(name, [&](std::ostream& o) {
    o << "epoch,loss\n";
    for (std::size_t e = 0; e < loss.size(); ++e) fmt::print(o, "{},{:.12g}\n", e, loss[e]);
  });
}

void write_ticks(ArtifactWriter& out, const std::string& name,
                 const std::vector<sim::TickRecord>& ticks) {
  out.write(name, [&](std::ostream& o) {
    o << "t,w_ref,w_meas,v_t_prev,i_a_prev,alpha,m_a\n";
    for (const auto& k : ticks) {
      fmt::print(o, "{:.9g},{:.9g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", k.t, k.w_ref,
                 k.w_meas, k.v_t_prev, k.i_a_prev, k.alpha, k.m_a);
    }
  });
}

void run_closed_loop(const config::ScenarioConfig& cfg, ArtifactWriter& out, RunReport& report) {
  const auto drive = drive_config(cfg);
  const auto tc = training_config(cfg);

  auto teacher = sim::make_teacher(drive, tc);
  const auto baseline = sim::simulate_drive(drive, teacher);

  sim::DriveResult result;
  std::string label = "PI";
  if (cfg.controller == config::ControllerKind::PI) {
    result = baseline;
  } else {
    label = "NEUROFUZZY";
    nn::Mlp ann1;
    nn::Mlp ann2;
    if (!cfg.ann1_path.empty()) {
      ann1 = load_model<nn::Mlp>(cfg.ann1_path, [](std::istream& in) { return nn::load(in); });
      ann2 = load_model<nn::Mlp>(cfg.ann2_path, [](std::istream& in) { return nn::load(in); });
    } else {
      auto trained = sim::train_controller(drive, tc, cfg.neuro_fuzzy.scaling);
      ann1 = std::move(trained.ann1);
      ann2 = std::move(trained.ann2);
      report.lines.push_back(fmt::format("trained on {} ticks, final losses {:.3e} / {:.3e}",
                                         trained.samples, trained.ann1_loss.back(),
                                         trained.ann2_loss.back()));
    }
    auto supervisor =
        cfg.supervisor_path.empty()
            ? control::make_supervisor(cfg.neuro_fuzzy.supervisor)
            : load_model<fuzzy::TSModel>(cfg.supervisor_path,
                                         [](std::istream& in) { return fuzzy::load(in); });
    control::NeuroFuzzyController controller(std::move(ann1), std::move(ann2),
                                             std::move(supervisor), cfg.neuro_fuzzy);
    result = sim::simulate_drive(drive, controller);
  }

  out.write("trajectory.csv",
            [&](std::ostream& o) { plant::write_trajectory_csv(o, result.trajectory); });
  write_ticks(out, "ticks.csv", result.ticks);
  out.write("metrics.csv", [&](std::ostream& o) {
    o << "controller,iae,steady_speed,steady_error_pct,peak_speed,iae_ratio_to_pi\n";
    auto row = [&](const std::string& name, const sim::DriveResult& r) {
      const double ratio = baseline.iae > 0.0 ? r.iae / baseline.iae : 1.0;
      fmt::print(o, "{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", name, r.iae, r.steady_speed,
                 r.steady_error_pct, r.peak_speed, ratio);
    };
    row(label, result);
    row("PI_BASELINE", baseline);
  });

  report.lines.push_back(fmt::format(
      "{}: steady speed {:.4f} rad/s (error {:.4f} %), IAE {:.4f} rad, PI baseline IAE {:.4f} rad",
      label, result.steady_speed, result.steady_error_pct, result.iae, baseline.iae));
}

void run_training(const config::ScenarioConfig& cfg, ArtifactWriter& out, RunReport& report) {
  const auto drive = drive_config(cfg);
  const auto trained = sim::train_controller(drive, training_config(cfg), cfg.neuro_fuzzy.scaling);
  const auto supervisor = control::make_supervisor(cfg.neuro_fuzzy.supervisor);

  out.write("ann1.mlp", [&](std::ostream& o) { nn::save(o, trained.ann1); });
  out.write("ann2.mlp", [&](std::ostream& o) { nn::save(o, trained.ann2); });
  out.write("supervisor.ts", [&](std::ostream& o) { fuzzy::save(o, supervisor); });
  write_loss(out, "loss_ann1.csv", trained.ann1_loss);
  write_loss(out, "loss_ann2.csv", trained.ann2_loss);
  report.lines.push_back(fmt::format("{} training ticks; final MSE ann1 {:.4e}, ann2 {:.4e}",
                                     trained.samples, trained.ann1_loss.back(),
                                     trained.ann2_loss.back()));
}

}  // namespace

RunReport run_scenario(const config::ScenarioConfig& cfg, std::uint64_t config_hash) {
  config::validate(cfg);
  ArtifactWriter out(cfg.output_dir);
  RunReport report;
  switch (cfg.mode) {
    case config::Mode::OpenLoopSPWM: run_open_loop(cfg, out, report); break;
    case config::Mode::Table1Sweep: run_table1(cfg, out, report); break;
    case config::Mode::ClosedLoopDrive: run_closed_loop(cfg, out, report); break;
    case config::Mode::TrainController: run_training(cfg, out, report); break;
  }
  out.manifest(cfg, config_hash);
  report.files = out.names();
  return report;
}

}  // namespace mldrive::scenario
