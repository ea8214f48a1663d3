#include "mldrive/analysis.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/errors.hpp"

namespace mldrive::analysis {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double x) {
  x = std::remainder(x, kTwoPi);
  return x <= -std::numbers::pi ? x + kTwoPi : x;
}

struct Projection {
  double sin_part = 0.0;
  double cos_part = 0.0;
};

Projection project(const Waveform& w, double f) {
  Projection p;
  const double cycles_per_sample = f * w.dt;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double cycles = static_cast<double>(n) * cycles_per_sample;
    const double angle = kTwoPi * (cycles - std::floor(cycles));
    p.sin_part += w.samples[n] * std::sin(angle);
    p.cos_part += w.samples[n] * std::cos(angle);
  }
  const double scale = 2.0 / static_cast<double>(w.size());
  p.sin_part *= scale;
  p.cos_part *= scale;
  return p;
}

void check_window(const Waveform& w, double f_fund) {
  if (!(w.dt > 0.0) || !(f_fund > 0.0) || w.size() == 0) {
    throw AnalysisError("waveform needs positive dt, samples and fundamental frequency");
  }
  const double periods = w.span() * f_fund;
  const double whole = std::round(periods);
  // tolerance of a millionth of a sample
  if (std::abs(periods - whole) > 1e-6 * w.dt * f_fund || whole < 2.0) {
    throw AnalysisError(fmt::format(
        "analysis window spans {} fundamental periods; need an integer >= 2", periods));
  }
}

}  // namespace

Spectrum spectrum_of(const Waveform& w, double f_fund, int n_harmonics) {
  check_window(w, f_fund);
  if (n_harmonics < 1) throw AnalysisError("need at least the fundamental");

  Spectrum s;
  s.f_fund = f_fund;
  s.magnitudes.reserve(static_cast<std::size_t>(n_harmonics));
  for (int n = 1; n <= n_harmonics; ++n) {
    const Projection p = project(w, n * f_fund);
    s.magnitudes.push_back(std::hypot(p.sin_part, p.cos_part));
    if (n == 1) s.phase_fund = std::atan2(p.cos_part, p.sin_part);
  }

  const double v1 = s.magnitudes.front();
  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  if (!(v1 > 1e-12 * peak) || peak == 0.0) {
    throw AnalysisError("fundamental is zero; THD undefined");
  }
  double harmonic_power = 0.0;
  for (std::size_t i = 1; i < s.magnitudes.size(); ++i) {
    harmonic_power += s.magnitudes[i] * s.magnitudes[i];
  }
  s.thd_pct = 100.0 * std::sqrt(harmonic_power) / v1;
  return s;
}

double fundamental_phase_lag(const Waveform& output, const Waveform& reference, double f_fund) {
  if (output.size() != reference.size() || output.dt != reference.dt) {
    throw AnalysisError("phase comparison needs waveforms with the same dt and span");
  }
  check_window(output, f_fund);
  auto phase = [&](const Waveform& w) {
    const Projection p = project(w, f_fund);
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    if (!(std::hypot(p.sin_part, p.cos_part) > 1e-12 * peak) || peak == 0.0) {
      throw AnalysisError("missing fundamental; phase undefined");
    }
    return std::atan2(p.cos_part, p.sin_part);
  };
  return wrap_pi(phase(reference) - phase(output));
}

double mean_square(const Waveform& w) {
  double acc = 0.0;
  for (double v : w.samples) acc += v * v;
  return w.size() ? acc / static_cast<double>(w.size()) : 0.0;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "n,f_hz,magnitude\n";
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i) {
    const auto n = static_cast<int>(i) + 1;
    fmt::print(out, "{},{:.9g},{:.12g}\n", n, n * s.f_fund, s.magnitudes[i]);
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,thd_pct,phase_lag_rad\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{:.6f},{:.9f}\n", r.method, r.thd_pct, r.phase_lag_rad);
  }
}

}  // namespace mldrive::analysis
