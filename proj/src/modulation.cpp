#include "mldrive/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/errors.hpp"

namespace mldrive::modulation {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

// Phase offset of a region's carrier in carrier periods. Inversion of a
// triangle equals a half-period shift.
double region_phase(int region, const ModulationConfig& cfg) {
  double phase = cfg.carrier_phase;
  if (carrier_inverted(region, cfg)) phase += 0.5;
  if (cfg.disposition == Disposition::Shift90) phase += 0.25 * (region - 1);
  return phase;
}

void check_region(int region, const ModulationConfig& cfg) {
  if (region < 1 || region > cfg.carrier_count()) {
    throw ConfigurationError(
        fmt::format("region {} outside [1, {}]", region, cfg.carrier_count()));
  }
}

bool uses_alternating_instants(const ModulationConfig& cfg) {
  return cfg.sampling == Sampling::Asymmetric || cfg.sampling == Sampling::CrossingCorrected;
}

// The sampling instant's segment for a region, valid for dispositions whose
// ramps start at the base carrier peaks and troughs.
CarrierSegment aligned_segment(double t_k, int region, const ModulationConfig& cfg) {
  CarrierSegment seg = segment_at(t_k + 0.5 * cfg.half_period(), region, cfg);
  seg.t_start = t_k;
  return seg;
}

int region_of_value(double v, const ModulationConfig& cfg) {
  const int r = static_cast<int>(std::floor(v / cfg.v_c + 0.5 * cfg.carrier_count())) + 1;
  return std::clamp(r, 1, cfg.carrier_count());
}

// Comparator state of one carrier in crossing-corrected mode.
bool corrected_state(double t, int region, long k, const ModulationConfig& cfg) {
  const double t_k = sampling_instant(k, cfg);
  const CarrierSegment seg = segment_at(t, region, cfg);
  const double w0 = std::max(t_k, seg.t_start);
  const double w1 = std::min(t_k + hold_period(cfg), seg.t_start + cfg.half_period());

  const double s_line = reference_slope(t_k, cfg);
  const double v_line = reference_value(t_k, cfg);
  const auto delay = compute_crossing_delay(t_k, seg, cfg);
  if (delay) {
    const double tau = t_k + *delay;
    if (tau >= w0 && tau <= w1) {
      if (t == tau) return true;
      const bool after = s_line > carrier_slope(seg, cfg);
      return t > tau ? after : !after;
    }
  }
  const double mid = 0.5 * (w0 + w1);
  return v_line + s_line * (mid - t_k) >= carrier_value(mid, seg, cfg);
}

}  // namespace

int ModulationConfig::m_f() const { return static_cast<int>(std::lround(f_c / f_m)); }

double ModulationConfig::reference_peak() const {
  return v_m > 0.0 ? v_m : 0.5 * carrier_count() * v_c;
}

void validate(const ModulationConfig& cfg) {
  if (cfg.levels_m < 3 || cfg.levels_m % 2 == 0) {
    throw ConfigurationError(fmt::format("levels_m must be odd and >= 3, got {}", cfg.levels_m));
  }
  if (!(cfg.f_m > 0.0) || !(cfg.f_c > cfg.f_m) || !std::isfinite(cfg.f_c)) {
    throw ConfigurationError(
        fmt::format("need f_c > f_m > 0, got f_c={} f_m={}", cfg.f_c, cfg.f_m));
  }
  const double ratio = cfg.f_c / cfg.f_m;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigurationError(fmt::format("m_f = f_c/f_m must be an integer, got {}", ratio));
  }
  if (!(cfg.m_a > 0.0) || cfg.m_a > 1.0) {
    throw ConfigurationError(fmt::format("m_a must lie in (0, 1], got {}", cfg.m_a));
  }
  if (!(cfg.v_c > 0.0) || !(cfg.v_m >= 0.0)) {
    throw ConfigurationError("v_c must be positive and v_m non-negative");
  }
  if (!std::isfinite(cfg.carrier_phase)) {
    throw ConfigurationError("carrier_phase must be finite");
  }
  if (cfg.crossing_refinements < 0) {
    throw ConfigurationError("crossing_refinements must be >= 0");
  }
}

double reference_value(double t, const ModulationConfig& cfg) {
  return cfg.m_a * cfg.reference_peak() * std::sin(kTwoPi * cfg.f_m * t);
}

double reference_slope(double t, const ModulationConfig& cfg) {
  const double w = kTwoPi * cfg.f_m;
  return cfg.m_a * cfg.reference_peak() * w * std::cos(w * t);
}

double band_center(int region, const ModulationConfig& cfg) {
  check_region(region, cfg);
  return (region - 0.5 * cfg.levels_m) * cfg.v_c;
}

bool carrier_inverted(int region, const ModulationConfig& cfg) {
  switch (cfg.disposition) {
    case Disposition::PH:
    case Disposition::Shift90:
      return false;
    case Disposition::PO:
      return region <= cfg.carrier_count() / 2;
    case Disposition::APO:
      // the top carrier is upright, then alternate downwards
      return (cfg.carrier_count() - region) % 2 == 1;
  }
  return false;
}

CarrierSegment segment_at(double t, int region, const ModulationConfig& cfg) {
  check_region(region, cfg);
  const double x = frac(t * cfg.f_c + region_phase(region, cfg));
  CarrierSegment seg;
  seg.region_r = region;
  if (x < 0.5) {
    seg.slope = Slope::Positive;
    seg.t_start = t - x / cfg.f_c;
  } else {
    seg.slope = Slope::Negative;
    seg.t_start = t - (x - 0.5) / cfg.f_c;
  }
  return seg;
}

double carrier_value(double t, const CarrierSegment& seg, const ModulationConfig& cfg) {
  const double local = t - seg.t_start;
  const double ramp = seg.slope == Slope::Positive
                          ? 2.0 * cfg.v_c * cfg.f_c * local - 0.5 * cfg.v_c
                          : -2.0 * cfg.v_c * cfg.f_c * local + 0.5 * cfg.v_c;
  return ramp + band_center(seg.region_r, cfg);
}

double carrier_slope(const CarrierSegment& seg, const ModulationConfig& cfg) {
  const double s = 2.0 * cfg.v_c * cfg.f_c;
  return seg.slope == Slope::Positive ? s : -s;
}

double carrier_at(double t, int region, const ModulationConfig& cfg) {
  return carrier_value(t, segment_at(t, region, cfg), cfg);
}

double hold_period(const ModulationConfig& cfg) {
  return uses_alternating_instants(cfg) ? 0.5 / cfg.f_c : 1.0 / cfg.f_c;
}

double sampling_instant(long k, const ModulationConfig& cfg) {
  // Base carrier peaks sit at t f_c + phase = j + 1/2, troughs at j.
  const double first = uses_alternating_instants(cfg)
                           ? 0.5 * frac(2.0 * (0.5 - cfg.carrier_phase)) / cfg.f_c
                           : frac(0.5 - cfg.carrier_phase) / cfg.f_c;
  return first + static_cast<double>(k) * hold_period(cfg);
}

long sample_index_at(double t, const ModulationConfig& cfg) {
  const double t0 = sampling_instant(0, cfg);
  return static_cast<long>(std::floor((t - t0) / hold_period(cfg) + 1e-9));
}

double sample_reference(const ModulationConfig& cfg, long k) {
  if (cfg.sampling == Sampling::Natural) {
    throw ModeError("natural sampling has no held samples");
  }
  return reference_value(sampling_instant(k, cfg), cfg);
}

std::optional<double> line_crossing_offset(double v0, double s_ref, double c0, double s_c) {
  const double ds = s_ref - s_c;
  if (std::abs(ds) <= 1e-12 * std::max(std::abs(s_ref), std::abs(s_c))) return std::nullopt;
  return (c0 - v0) / ds;
}

std::optional<double> compute_crossing_delay(double t_k, const CarrierSegment& seg,
                                             const ModulationConfig& cfg) {
  const double s_c = carrier_slope(seg, cfg);
  auto delay = line_crossing_offset(reference_value(t_k, cfg), reference_slope(t_k, cfg),
                                    carrier_value(t_k, seg, cfg), s_c);
  if (!delay) return std::nullopt;
  for (int pass = 0; pass < cfg.crossing_refinements; ++pass) {
    const double t = t_k + *delay;
    const double f = reference_value(t, cfg) - carrier_value(t, seg, cfg);
    const double df = reference_slope(t, cfg) - s_c;
    if (f == 0.0 || std::abs(df) <= 1e-12 * std::abs(s_c)) break;
    *delay -= f / df;
  }
  return delay;
}

int update_region(double delta_t_k, const CarrierSegment& seg, const ModulationConfig& cfg) {
  const double half = cfg.half_period();
  int r = seg.region_r;
  if (delta_t_k > half) {
    r += seg.slope == Slope::Positive ? 1 : -1;
  } else if (delta_t_k < 0.0) {
    r += seg.slope == Slope::Positive ? -1 : 1;
  }
  return std::clamp(r, 1, cfg.carrier_count());
}

CrossingResult locate_crossing(long k, int start_region, const ModulationConfig& cfg) {
  if (cfg.disposition == Disposition::Shift90) {
    throw ConfigurationError("region tracking needs a vertically shifted disposition");
  }
  const double t_k = sampling_instant(k, cfg);
  const double half = cfg.half_period();
  int region = std::clamp(start_region, 1, cfg.carrier_count());
  int previous = -1;

  for (int attempt = 0; attempt <= cfg.carrier_count(); ++attempt) {
    CrossingResult result;
    result.segment = aligned_segment(t_k, region, cfg);
    const auto delay = compute_crossing_delay(t_k, result.segment, cfg);
    if (!delay) return result;

    const int next = update_region(*delay, result.segment, cfg);
    if (next == region || next == previous) {
      result.crossed = *delay >= 0.0 && *delay <= half;
      result.delta_t = std::clamp(*delay, 0.0, half);
      return result;
    }
    previous = region;
    region = next;
  }
  // Unreachable for a monotone band stack; keep the last region.
  CrossingResult result;
  result.segment = aligned_segment(t_k, region, cfg);
  return result;
}

double processed_reference(double t, const ModulationConfig& cfg) {
  switch (cfg.sampling) {
    case Sampling::Natural:
      return reference_value(t, cfg);
    case Sampling::Symmetric:
    case Sampling::Asymmetric:
      return sample_reference(cfg, sample_index_at(t, cfg));
    case Sampling::CrossingCorrected: {
      const double t_k = sampling_instant(sample_index_at(t, cfg), cfg);
      return reference_value(t_k, cfg) + reference_slope(t_k, cfg) * (t - t_k);
    }
  }
  return 0.0;
}

int level_at(double t, const ModulationConfig& cfg) {
  int above = 0;
  if (cfg.sampling == Sampling::CrossingCorrected) {
    const long k = sample_index_at(t, cfg);
    for (int r = 1; r <= cfg.carrier_count(); ++r) {
      if (corrected_state(t, r, k, cfg)) ++above;
    }
  } else {
    const double ref = processed_reference(t, cfg);
    for (int r = 1; r <= cfg.carrier_count(); ++r) {
      if (ref >= carrier_at(t, r, cfg)) ++above;
    }
  }
  return above - cfg.max_level();
}

namespace {

std::size_t checked_sample_count(const ModulationConfig& cfg, double duration, double dt) {
  validate(cfg);
  if (!(dt > 0.0) || dt > 1.0 / (20.0 * cfg.f_c) * (1.0 + 1e-12)) {
    throw ConfigurationError(
        fmt::format("dt={} does not resolve the carrier (need 0 < dt <= 1/(20 f_c))", dt));
  }
  if (duration < (1.0 - 1e-12) / cfg.f_m) {
    throw ConfigurationError("duration must cover at least one reference period");
  }
  return static_cast<std::size_t>(std::llround(duration / dt));
}

}  // namespace

LevelSeries generate_levels(const ModulationConfig& cfg, double duration, double dt) {
  const std::size_t n = checked_sample_count(cfg, duration, dt);
  LevelSeries out;
  out.dt = dt;
  out.levels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.levels[i] = level_at(static_cast<double>(i) * dt, cfg);
  }
  return out;
}

LevelSeries generate_levels_tracked(const ModulationConfig& cfg, double duration, double dt) {
  const std::size_t n = checked_sample_count(cfg, duration, dt);
  if (cfg.sampling != Sampling::CrossingCorrected) {
    throw ModeError("the region tracker runs in crossing-corrected mode only");
  }
  LevelSeries out;
  out.dt = dt;
  out.levels.resize(n);

  long current_k = sample_index_at(0.0, cfg);
  int region = region_of_value(reference_value(sampling_instant(current_k, cfg), cfg), cfg);
  CrossingResult crossing = locate_crossing(current_k, region, cfg);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const long k = sample_index_at(t, cfg);
    if (k != current_k) {
      current_k = k;
      crossing = locate_crossing(k, crossing.segment.region_r, cfg);
    }
    const CarrierSegment& seg = crossing.segment;
    const double t_k = sampling_instant(current_k, cfg);
    const double s_line = reference_slope(t_k, cfg);
    bool state;
    if (crossing.crossed) {
      const double tau = t_k + crossing.delta_t;
      const bool after = s_line > carrier_slope(seg, cfg);
      state = t == tau ? true : (t > tau ? after : !after);
    } else {
      const double mid = t_k + 0.5 * cfg.half_period();
      state = reference_value(t_k, cfg) + s_line * (mid - t_k) >= carrier_value(mid, seg, cfg);
    }
    out.levels[i] = (seg.region_r - 1) + (state ? 1 : 0) - cfg.max_level();
  }
  return out;
}

void write_levels_csv(std::ostream& out, const LevelSeries& levels) {
  out << "t,level\n";
  for (std::size_t i = 0; i < levels.levels.size(); ++i) {
    fmt::print(out, "{:.9g},{}\n", static_cast<double>(i) * levels.dt, levels.levels[i]);
  }
}

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::PH: return "PH";
    case Disposition::PO: return "PO";
    case Disposition::APO: return "APO";
    case Disposition::Shift90: return "SHIFT90";
  }
  return "?";
}

std::string_view to_string(Sampling s) {
  switch (s) {
    case Sampling::Natural: return "NATURAL";
    case Sampling::Symmetric: return "SYM";
    case Sampling::Asymmetric: return "ASYM";
    case Sampling::CrossingCorrected: return "CROSSING";
  }
  return "?";
}

Disposition parse_disposition(std::string_view text) {
  for (auto d : {Disposition::PH, Disposition::PO, Disposition::APO, Disposition::Shift90}) {
    if (text == to_string(d)) return d;
  }
  throw ConfigurationError(fmt::format("unknown disposition '{}' (PH|PO|APO|SHIFT90)", text));
}

Sampling parse_sampling(std::string_view text) {
  for (auto s : {Sampling::Natural, Sampling::Symmetric, Sampling::Asymmetric,
                 Sampling::CrossingCorrected}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigurationError(fmt::format("unknown sampling '{}' (NATURAL|SYM|ASYM|CROSSING)", text));
}

}  // namespace mldrive::modulation
