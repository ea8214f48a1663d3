#pragma once

#include <iosfwd>

#include "mldrive/modulation.hpp"
#include "mldrive/waveform.hpp"

namespace mldrive::inverter {

// Ideal m-level DC link. Adjacent levels are v_dc_total / (levels_m - 1)
// apart and the output spans +-v_dc_total / 2.
struct InverterConfig {
  double v_dc_total = 400.0;  // V
  int levels_m = 5;

  double step_voltage() const { return v_dc_total / (levels_m - 1); }
};

void validate(const InverterConfig& inv);

double level_voltage(int level, const InverterConfig& inv);

// Throws IntegrityError when a level leaves [-(m-1)/2, (m-1)/2].
Waveform synthesize_voltage(const modulation::LevelSeries& levels, const InverterConfig& inv);

// Header `t,v`.
void write_waveform_csv(std::ostream& out, const Waveform& w);

}  // namespace mldrive::inverter
