#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mldrive::modulation {

// Vertical arrangement of the level-shifted carriers.
enum class Disposition {
  PH,       // all carriers in phase
  PO,       // carriers below zero in opposition to those above
  APO,      // successive carriers alternately in opposition
  Shift90,  // in phase, each successive carrier a quarter period later
};

enum class Sampling {
  Natural,            // continuous reference
  Symmetric,          // sampled at each positive carrier peak, held one period
  Asymmetric,         // sampled at every peak and trough, held half a period
  CrossingCorrected,  // asymmetric instants plus extrapolated crossing times
};

enum class Slope { Positive, Negative };

struct ModulationConfig {
  int levels_m = 5;
  double f_c = 1050.0;  // Hz
  double f_m = 50.0;    // Hz
  double m_a = 1.0;
  // Reference peak at m_a = 1. Zero selects the full carrier stack,
  // (levels_m - 1) / 2 * v_c.
  double v_m = 0.0;
  double v_c = 1.0;  // peak-to-peak height of one carrier band
  Disposition disposition = Disposition::PH;
  Sampling sampling = Sampling::Natural;
  // Carrier position at t = 0 as a fraction of the carrier period; 0 starts
  // on a rising ramp at the band bottom. 0.25 puts a rising zero crossing at
  // the reference zero crossing, which makes the output quarter-wave
  // symmetric for odd m_f.
  double carrier_phase = 0.25;
  // Extra Newton passes applied after the first-order crossing estimate.
  int crossing_refinements = 4;

  int m_f() const;
  int carrier_count() const { return levels_m - 1; }
  int max_level() const { return (levels_m - 1) / 2; }
  double reference_peak() const;
  double half_period() const { return 0.5 / f_c; }
};

// Throws ConfigurationError on any invariant violation.
void validate(const ModulationConfig& cfg);

struct CarrierSegment {
  int region_r = 1;  // 1 .. levels_m - 1, bottom band first
  Slope slope = Slope::Positive;
  double t_start = 0.0;
};

struct LevelSeries {
  double dt = 0.0;
  std::vector<int> levels;
};

double reference_value(double t, const ModulationConfig& cfg);
double reference_slope(double t, const ModulationConfig& cfg);

// Vertical centre of a region's band.
double band_center(int region, const ModulationConfig& cfg);

// Whether the region's carrier is inverted relative to the base carrier.
bool carrier_inverted(int region, const ModulationConfig& cfg);

// The half-period ramp of the region's carrier that contains t.
CarrierSegment segment_at(double t, int region, const ModulationConfig& cfg);

// Ramp value on the segment: 2 V_c f_c t' - V_c / 2 rising, or
// -2 V_c f_c t' + V_c / 2 falling, with t' = t - t_start, then shifted to
// the region's band.
double carrier_value(double t, const CarrierSegment& seg, const ModulationConfig& cfg);
double carrier_slope(const CarrierSegment& seg, const ModulationConfig& cfg);

// Carrier of a region at an arbitrary time.
double carrier_at(double t, int region, const ModulationConfig& cfg);

// Sampling instants. Symmetric mode samples at the positive peaks of the base
// carrier; asymmetric and crossing-corrected modes add the troughs.
double hold_period(const ModulationConfig& cfg);
double sampling_instant(long k, const ModulationConfig& cfg);
long sample_index_at(double t, const ModulationConfig& cfg);

// Held staircase value of sample k. Throws ModeError in natural mode.
double sample_reference(const ModulationConfig& cfg, long k);

// Offset from t_k to the crossing of the reference with the segment's carrier
// line. The first-order extrapolation V_r(t_k) + V_r'(t_k) (t - t_k) is
// intersected with the line, then refined by cfg.crossing_refinements Newton
// passes on the true reference. Returns nullopt when the extrapolated
// reference runs parallel to the carrier.
std::optional<double> compute_crossing_delay(double t_k, const CarrierSegment& seg,
                                             const ModulationConfig& cfg);

// Region transition implied by a crossing delay, clamped to the band range.
int update_region(double delta_t_k, const CarrierSegment& seg, const ModulationConfig& cfg);

struct CrossingResult {
  CarrierSegment segment;     // segment of the final region
  double delta_t = 0.0;       // clamped to [0, half period] when !crossed
  bool crossed = false;       // a crossing lies inside the half period
};

// Runs the region-transition rules from start_region at sampling instant k
// until the crossing falls inside the half period or no region hosts one.
// Only vertically shifted dispositions (PH, PO, APO) share segment
// boundaries with the sampling instants; Shift90 throws ConfigurationError.
CrossingResult locate_crossing(long k, int start_region, const ModulationConfig& cfg);

// Output level at time t for the configured sampling mode: the number of
// carriers the processed reference lies on or above, minus (levels_m-1)/2.
int level_at(double t, const ModulationConfig& cfg);

// Requires dt <= 1 / (20 f_c) and duration >= 1 / f_m.
LevelSeries generate_levels(const ModulationConfig& cfg, double duration, double dt);

// Crossing-corrected levels produced by the region tracker alone (one active
// region per half period). Vertically shifted dispositions only.
LevelSeries generate_levels_tracked(const ModulationConfig& cfg, double duration, double dt);

// Reference as seen by the comparator: the sine itself, the held sample, or
// in crossing-corrected mode the first-order line from the latest sampling
// instant (the refined switching instants are applied per carrier by
// level_at).
double processed_reference(double t, const ModulationConfig& cfg);

// Intersection offset of the line v0 + s_ref * dt with c0 + s_c * dt.
std::optional<double> line_crossing_offset(double v0, double s_ref, double c0, double s_c);

void write_levels_csv(std::ostream& out, const LevelSeries& levels);

std::string_view to_string(Disposition d);
std::string_view to_string(Sampling s);
Disposition parse_disposition(std::string_view text);
Sampling parse_sampling(std::string_view text);

}  // namespace mldrive::modulation
