#pragma once

namespace mldrive::current_loop {

struct PhaseCurrents {
  double i_a = 0.0;
  double i_b = 0.0;
  double i_c = 0.0;
};

// Ideal 120-degree-conduction template: at any electrical angle one phase
// carries +|i|, one carries -|i| and one is off.
PhaseCurrents quasi_square_currents(double amplitude, double theta);

struct CurrentLoopState {
  double i_max_est = 0.0;     // A
  double filter_state = 0.0;  // low-pass output
  bool primed = false;        // filter seeded with its first input
  double i_ref = 0.0;         // A
  double integrator = 0.0;    // A s
};

struct CurrentGains {
  double kp = 0.05;  // 1/A
  double ki = 2.0;   // 1/(A s)
};

// Rectify (largest absolute phase current) and low-pass with time constant
// tau. The filter is seeded with the first rectified value.
double extract_imax(const PhaseCurrents& currents, CurrentLoopState& state, double dt,
                    double tau);

// PI on (i_ref - i_max_est), clamped to [0, 1]. The integrator freezes while
// the output sits on a clamp and the error pushes further into it.
double current_controller(double i_ref, double i_max_est, const CurrentGains& gains, double dt,
                          CurrentLoopState& state);

// T = K_T I_MAX. Throws DomainError for negative i_max.
double electromagnetic_torque(double i_max, double k_t_amp);

}  // namespace mldrive::current_loop
