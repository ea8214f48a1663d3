#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mldrive/waveform.hpp"

namespace mldrive::analysis {

struct Spectrum {
  double f_fund = 0.0;
  std::vector<double> magnitudes;  // peak V_n, index 0 holds n = 1
  double phase_fund = 0.0;         // rad, fundamental ~ V_1 sin(w t + phase_fund)
  double thd_pct = 0.0;

  double magnitude(int n) const { return magnitudes.at(static_cast<std::size_t>(n - 1)); }
};

// Synchronous Fourier projection at exact multiples of f_fund. The waveform
// must span an integer number (>= 2) of fundamental periods.
Spectrum spectrum_of(const Waveform& w, double f_fund, int n_harmonics = 100);

// Fundamental phase of the reference minus that of the output, wrapped to
// (-pi, pi]. Positive when the output lags.
double fundamental_phase_lag(const Waveform& output, const Waveform& reference, double f_fund);

double mean_square(const Waveform& w);

// Header `n,f_hz,magnitude`.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

struct SummaryRow {
  std::string method;
  double thd_pct = 0.0;
  double phase_lag_rad = 0.0;
};

// Header `method,thd_pct,phase_lag_rad`.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace mldrive::analysis
