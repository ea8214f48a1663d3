#include "mldrive/inverter.hpp"

#include <cstdlib>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/errors.hpp"

namespace mldrive::inverter {

void validate(const InverterConfig& inv) {
  if (!(inv.v_dc_total > 0.0)) {
    throw ConfigurationError(fmt::format("v_dc_total must be positive, got {}", inv.v_dc_total));
  }
  if (inv.levels_m < 3 || inv.levels_m % 2 == 0) {
    throw ConfigurationError(fmt::format("levels_m must be odd and >= 3, got {}", inv.levels_m));
  }
}

double level_voltage(int level, const InverterConfig& inv) {
  if (std::abs(level) > (inv.levels_m - 1) / 2) {
    throw IntegrityError(fmt::format("level {} outside the {}-level band", level, inv.levels_m));
  }
  return level * inv.step_voltage();
}

Waveform synthesize_voltage(const modulation::LevelSeries& levels, const InverterConfig& inv) {
  validate(inv);
  Waveform w;
  w.dt = levels.dt;
  w.samples.reserve(levels.levels.size());
  for (int level : levels.levels) w.samples.push_back(level_voltage(level, inv));
  return w;
}

void write_waveform_csv(std::ostream& out, const Waveform& w) {
  out << "t,v\n";
  for (std::size_t n = 0; n < w.size(); ++n) {
    fmt::print(out, "{:.9g},{:.12g}\n", w.time_at(n), w.samples[n]);
  }
}

}  // namespace mldrive::inverter
