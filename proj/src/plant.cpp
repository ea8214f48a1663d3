#include "mldrive/plant.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mldrive/errors.hpp"

namespace mldrive::plant {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const MotorParams& p) {
  if (!positive_finite(p.r_total) || !positive_finite(p.l_total) || !positive_finite(p.k_m) ||
      !positive_finite(p.k_t_amp) || !positive_finite(p.j_inertia) ||
      !positive_finite(p.b_friction)) {
    throw ConfigurationError("motor parameters must be finite and strictly positive");
  }
}

double electrical_torque(double i, const MotorParams& p) {
  switch (p.torque_model) {
    case TorqueModel::SeriesQuadratic:
      return p.k_m * i * i;
    case TorqueModel::AmplitudeLinear:
      return p.k_t_amp * std::abs(i);
  }
  return 0.0;
}

Derivatives derivatives(const MotorState& state, double v_applied, double t_load,
                        const MotorParams& p) {
  if (!std::isfinite(state.omega) || !std::isfinite(state.i) || !std::isfinite(state.t) ||
      !std::isfinite(v_applied) || !std::isfinite(t_load)) {
    throw StateCorruptionError(
        fmt::format("non-finite plant input at t={} (omega={}, i={}, v={}, load={})", state.t,
                    state.omega, state.i, v_applied, t_load));
  }
  const double back_emf = p.k_m * state.i * state.omega;
  Derivatives d;
  d.di_dt = (v_applied - p.r_total * state.i - back_emf) / p.l_total;
  d.domega_dt =
      (electrical_torque(state.i, p) - p.b_friction * state.omega - t_load) / p.j_inertia;
  return d;
}

MotorState step_motor(const MotorState& state, double v_applied, double t_load,
                      const MotorParams& p, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigurationError(fmt::format("integration step must be positive, got {}", dt));
  }
  auto at = [&](const MotorState& base, const Derivatives& k, double h) {
    return MotorState{base.omega + h * k.domega_dt, base.i + h * k.di_dt, base.t + h};
  };
  const Derivatives k1 = derivatives(state, v_applied, t_load, p);
  const Derivatives k2 = derivatives(at(state, k1, dt / 2), v_applied, t_load, p);
  const Derivatives k3 = derivatives(at(state, k2, dt / 2), v_applied, t_load, p);
  const Derivatives k4 = derivatives(at(state, k3, dt), v_applied, t_load, p);

  MotorState next;
  next.omega = state.omega +
               dt / 6.0 * (k1.domega_dt + 2.0 * k2.domega_dt + 2.0 * k3.domega_dt + k4.domega_dt);
  next.i = state.i + dt / 6.0 * (k1.di_dt + 2.0 * k2.di_dt + 2.0 * k3.di_dt + k4.di_dt);
  next.t = state.t + dt;
  if (!std::isfinite(next.omega) || !std::isfinite(next.i)) {
    throw StateCorruptionError(fmt::format("plant state diverged at t={}", next.t));
  }
  return next;
}

MotorState steady_state_dc(double v_applied, double t_load, const MotorParams& p) {
  validate(p);
  if (p.torque_model != TorqueModel::SeriesQuadratic) {
    throw ConfigurationError("closed-form steady state is only available in series mode");
  }
  if (!(v_applied > 0.0) || t_load < 0.0) {
    throw DomainError("steady state needs positive voltage and non-negative load");
  }
  // With omega = (k_m i^2 - t_load) / b, the voltage balance becomes a cubic in i:
  // g(i) = r i + k_m i (k_m i^2 - t_load) / b - v. g is increasing once
  // k_m i^2 > t_load, so bisect on the unique root above sqrt(t_load / k_m).
  auto g = [&](double i) {
    const double omega = (p.k_m * i * i - t_load) / p.b_friction;
    return p.r_total * i + p.k_m * i * omega - v_applied;
  };
  double lo = std::sqrt(t_load / p.k_m);
  double hi = std::max(lo, v_applied / p.r_total) + 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double i = 0.5 * (lo + hi);
  return MotorState{(p.k_m * i * i - t_load) / p.b_friction, i, 0.0};
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "t,omega,i,v_applied,torque\n";
  for (const auto& r : rows) {
    fmt::print(out, "{:.9g},{:.12g},{:.12g},{:.12g},{:.12g}\n", r.t, r.omega, r.i, r.v_applied,
               r.torque);
  }
}

}  // namespace mldrive::plant
