#pragma once

#include <cstddef>
#include <vector>

namespace mldrive {

// Uniformly sampled real signal. Sample n sits at time n * dt.
struct Waveform {
  double dt = 0.0;
  std::vector<double> samples;

  std::size_t size() const noexcept { return samples.size(); }
  double time_at(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }
  double span() const noexcept { return static_cast<double>(samples.size()) * dt; }
};

}  // namespace mldrive
