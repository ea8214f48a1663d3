#include "mldrive/current_loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mldrive/errors.hpp"

namespace mldrive::current_loop {

namespace {

// +1 for 120 degrees, 0 for 60, -1 for 120, 0 for 60.
double template_sign(double theta) {
  constexpr double kSixty = std::numbers::pi / 3.0;
  double x = std::fmod(theta, 2.0 * std::numbers::pi);
  if (x < 0.0) x += 2.0 * std::numbers::pi;
  const int sector = std::min(5, static_cast<int>(x / kSixty));
  constexpr double kSigns[6] = {1.0, 1.0, 0.0, -1.0, -1.0, 0.0};
  return kSigns[sector];
}

}  // namespace

PhaseCurrents quasi_square_currents(double amplitude, double theta) {
  constexpr double kShift = 2.0 * std::numbers::pi / 3.0;
  const double a = std::abs(amplitude);
  return {a * template_sign(theta), a * template_sign(theta - kShift),
          a * template_sign(theta + kShift)};
}

double extract_imax(const PhaseCurrents& currents, CurrentLoopState& state, double dt,
                    double tau) {
  if (!(dt > 0.0) || !(tau > 0.0)) {
    throw ConfigurationError(fmt::format("need dt > 0 and tau > 0 (dt={}, tau={})", dt, tau));
  }
  const double rectified =
      std::max({std::abs(currents.i_a), std::abs(currents.i_b), std::abs(currents.i_c)});
  if (!state.primed) {
    state.filter_state = rectified;
    state.primed = true;
  } else {
    state.filter_state += (1.0 - std::exp(-dt / tau)) * (rectified - state.filter_state);
  }
  state.i_max_est = std::max(0.0, state.filter_state);
  return state.i_max_est;
}

double current_controller(double i_ref, double i_max_est, const CurrentGains& gains, double dt,
                          CurrentLoopState& state) {
  if (!(gains.kp > 0.0) || !(gains.ki > 0.0)) {
    throw ConfigurationError("current loop gains must be positive");
  }
  state.i_ref = std::max(0.0, i_ref);
  const double error = state.i_ref - i_max_est;
  const double candidate = state.integrator + error * dt;
  const double unclamped = gains.kp * error + gains.ki * candidate;
  const bool winding_up = (unclamped > 1.0 && error > 0.0) || (unclamped < 0.0 && error < 0.0);
  if (!winding_up) state.integrator = candidate;
  return std::clamp(gains.kp * error + gains.ki * state.integrator, 0.0, 1.0);
}

double electromagnetic_torque(double i_max, double k_t_amp) {
  if (i_max < 0.0) throw DomainError(fmt::format("I_MAX must be non-negative, got {}", i_max));
  return k_t_amp * i_max;
}

}  // namespace mldrive::current_loop
