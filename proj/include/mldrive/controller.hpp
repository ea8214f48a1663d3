#pragma once

#include "mldrive/fuzzy.hpp"
#include "mldrive/mlp.hpp"

namespace mldrive::control {

// One speed-controller tick. ANN1 fills w_est_k, ANN2 produces alpha_k.
struct ControllerSample {
  double w_ref_k = 0.0;   // rad/s
  double v_t_prev = 0.0;  // V, terminal voltage amplitude of the previous tick
  double i_a_prev = 0.0;  // A, current amplitude of the previous tick
  double w_est_k = 0.0;   // rad/s
  double alpha_k = 0.0;   // modulation-index command in [0, 1]
};

// Divisors applied to the physical quantities before they reach the networks.
// ANN1's output is multiplied back by `speed`.
struct InputScaling {
  double speed = 1.0;
  double voltage = 1.0;
  double current = 1.0;
};

// Returns the unclamped ANN2 output; sample.w_est_k and sample.alpha_k
// (clamped to [0, 1]) are filled in.
double controller_step(const nn::Mlp& ann1, const nn::Mlp& ann2, ControllerSample& sample,
                       const InputScaling& scaling = {});

// Everything a speed controller sees at a tick.
struct ControlInputs {
  double w_ref = 0.0;
  double w_meas = 0.0;
  double v_t_prev = 0.0;
  double i_a_prev = 0.0;
};

class SpeedController {
 public:
  virtual ~SpeedController() = default;
  virtual double step(const ControlInputs& in) = 0;
  virtual void reset() = 0;
};

// Proportional-integral baseline with conditional-integration anti-windup.
class PiSpeedController final : public SpeedController {
 public:
  PiSpeedController(double kp, double ki, double period);

  double step(const ControlInputs& in) override;
  void reset() override { integrator_ = 0.0; }

  double kp() const { return kp_; }
  double ki() const { return ki_; }

 private:
  double kp_;
  double ki_;
  double period_;
  double integrator_ = 0.0;
};

struct SupervisorConfig {
  int sets_per_input = 5;
  double error_scale = 100.0;  // rad/s mapped to a normalised error of 1
  double delta_scale = 5.0;    // rad/s per tick mapped to a normalised change of 1
  // Incremental gains per tick on the physical error and error change; the
  // rule base scales them up for large errors. The defaults are the teacher
  // PI gains divided by the default blend of 0.5.
  double ki_step = 2e-3;   // per rad/s
  double kp_step = 0.2;    // per rad/s
  double outer_gain = 1.5; // rule gain at the corners of the grid
};

// Full-grid TS rule base over (normalised error, normalised error change)
// acting as an incremental PI law: y_i = k_i (c_1 e + c_2 de), with k_i
// growing from 1 at the centre to outer_gain at the corners.
fuzzy::TSModel make_supervisor(const SupervisorConfig& cfg);

struct NeuroFuzzyConfig {
  InputScaling scaling{100.0, 200.0, 10.0};
  SupervisorConfig supervisor;
  double blend = 0.5;  // 0 = ANN2 alone, 1 = fuzzy supervisor alone
};

// ANN1 estimates speed, ANN2 issues alpha, and the TS supervisor acts as an
// incremental (velocity-form) fuzzy PI on the measured speed error whose
// accumulated output u_f is blended in:
//   alpha = clamp((1 - blend) * alpha_ann + blend * u_f, 0, 1).
// u_f stops accumulating while alpha sits on a clamp in the direction of the
// increment.
class NeuroFuzzyController final : public SpeedController {
 public:
  NeuroFuzzyController(nn::Mlp ann1, nn::Mlp ann2, fuzzy::TSModel supervisor,
                       NeuroFuzzyConfig cfg);

  double step(const ControlInputs& in) override;
  void reset() override;

  const ControllerSample& last_sample() const { return sample_; }
  const nn::Mlp& ann1() const { return ann1_; }
  const nn::Mlp& ann2() const { return ann2_; }
  const fuzzy::TSModel& supervisor() const { return supervisor_; }
  const NeuroFuzzyConfig& config() const { return cfg_; }

 private:
  nn::Mlp ann1_;
  nn::Mlp ann2_;
  fuzzy::TSModel supervisor_;
  NeuroFuzzyConfig cfg_;
  ControllerSample sample_;
  double fuzzy_state_ = 0.0;
  double error_prev_ = 0.0;
  double fuzzy_prev_ = 0.0;
  bool first_ = true;
};

}  // namespace mldrive::control
