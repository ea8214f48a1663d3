#pragma once

#include <iosfwd>
#include <vector>

namespace mldrive::plant {

enum class TorqueModel {
  SeriesQuadratic,  // T_e = k_m * i^2 (series field, universal-motor behaviour)
  AmplitudeLinear,  // T_e = k_t_amp * |i| (flat-top amplitude drives torque)
};

// Desk-scale defaults. These are illustrative values, not measured machine
// data.
struct MotorParams {
  double r_total = 2.0;      // ohm, armature + field
  double l_total = 0.05;     // H
  double k_m = 0.05;         // V s / (A rad), also N m / A^2
  double k_t_amp = 0.8;      // N m / A
  double j_inertia = 0.01;   // kg m^2
  double b_friction = 0.001; // N m s / rad
  TorqueModel torque_model = TorqueModel::SeriesQuadratic;
};

struct MotorState {
  double omega = 0.0;  // rad/s
  double i = 0.0;      // A
  double t = 0.0;      // s
};

struct Derivatives {
  double di_dt = 0.0;
  double domega_dt = 0.0;
};

// Throws ConfigurationError unless every numeric field is finite and > 0.
void validate(const MotorParams& p);

double electrical_torque(double i, const MotorParams& p);

// l di/dt = v - r i - k_m i omega
// j domega/dt = T_e - b omega - t_load
Derivatives derivatives(const MotorState& state, double v_applied, double t_load,
                        const MotorParams& p);

// One classical fourth-order Runge-Kutta step with the applied voltage and
// load held constant across the step.
MotorState step_motor(const MotorState& state, double v_applied, double t_load,
                      const MotorParams& p, double dt);

// Steady state of the series motor on a constant DC voltage against a constant
// load. Solves k_m i^2 = b omega + t_load and v = (r + k_m omega) i for i > 0.
MotorState steady_state_dc(double v_applied, double t_load, const MotorParams& p);

struct TrajectoryRow {
  double t = 0.0;
  double omega = 0.0;
  double i = 0.0;
  double v_applied = 0.0;
  double torque = 0.0;
};

// Header `t,omega,i,v_applied,torque`.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

}  // namespace mldrive::plant
