#include "mldrive/controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "mldrive/errors.hpp"

namespace mldrive::control {

double controller_step(const nn::Mlp& ann1, const nn::Mlp& ann2, ControllerSample& sample,
                       const InputScaling& scaling) {
  if (ann1.input_dim() != 3 || ann1.output_dim() != 1 || ann2.input_dim() != 4 ||
      ann2.output_dim() != 1) {
    throw ShapeError("controller needs a 3->1 estimator and a 4->1 command network");
  }
  const double w_ref = sample.w_ref_k / scaling.speed;
  const double v_t = sample.v_t_prev / scaling.voltage;
  const double i_a = sample.i_a_prev / scaling.current;

  const std::array<double, 3> x1{w_ref, v_t, i_a};
  const double w_est = nn::mlp_forward(ann1, x1)[0];
  sample.w_est_k = w_est * scaling.speed;

  const std::array<double, 4> x2{w_ref, v_t, i_a, w_est};
  const double raw = nn::mlp_forward(ann2, x2)[0];
  sample.alpha_k = std::clamp(raw, 0.0, 1.0);
  return raw;
}

PiSpeedController::PiSpeedController(double kp, double ki, double period)
    : kp_(kp), ki_(ki), period_(period) {
  if (!(kp > 0.0) || !(ki > 0.0) || !(period > 0.0)) {
    throw ConfigurationError("PI gains and period must be positive");
  }
}

double PiSpeedController::step(const ControlInputs& in) {
  const double error = in.w_ref - in.w_meas;
  const double candidate = integrator_ + error * period_;
  const double unclamped = kp_ * error + ki_ * candidate;
  if (!((unclamped > 1.0 && error > 0.0) || (unclamped < 0.0 && error < 0.0))) {
    integrator_ = candidate;
  }
  return std::clamp(kp_ * error + ki_ * integrator_, 0.0, 1.0);
}

fuzzy::TSModel make_supervisor(const SupervisorConfig& cfg) {
  if (cfg.sets_per_input < 2 || !(cfg.error_scale > 0.0) || !(cfg.delta_scale > 0.0)) {
    throw ConfigurationError("supervisor needs >= 2 sets per input and positive scales");
  }
  const auto sets = fuzzy::triangular_partition(-1.0, 1.0, cfg.sets_per_input);
  const double c_error = cfg.ki_step * cfg.error_scale;
  const double c_delta = cfg.kp_step * cfg.delta_scale;

  fuzzy::TSModel model;
  model.input_dim = 2;
  for (const auto& e_set : sets) {
    for (const auto& d_set : sets) {
      const double spread = 0.5 * (std::abs(e_set.params[1]) + std::abs(d_set.params[1]));
      const double k = 1.0 + (cfg.outer_gain - 1.0) * spread;
      model.rules.push_back({{e_set, d_set}, {0.0, k * c_error, k * c_delta}});
    }
  }
  fuzzy::validate(model);
  return model;
}

NeuroFuzzyController::NeuroFuzzyController(nn::Mlp ann1, nn::Mlp ann2,
                                           fuzzy::TSModel supervisor, NeuroFuzzyConfig cfg)
    : ann1_(std::move(ann1)),
      ann2_(std::move(ann2)),
      supervisor_(std::move(supervisor)),
      cfg_(cfg) {
  nn::validate(ann1_);
  nn::validate(ann2_);
  fuzzy::validate(supervisor_);
  if (supervisor_.input_dim != 2) throw ShapeError("supervisor takes (error, error change)");
  if (!(cfg_.blend >= 0.0 && cfg_.blend <= 1.0)) {
    throw ConfigurationError(fmt::format("blend must lie in [0, 1], got {}", cfg_.blend));
  }
}

void NeuroFuzzyController::reset() {
  sample_ = {};
  fuzzy_state_ = 0.0;
  error_prev_ = 0.0;
  fuzzy_prev_ = 0.0;
  first_ = true;
}

double NeuroFuzzyController::step(const ControlInputs& in) {
  sample_.w_ref_k = in.w_ref;
  sample_.v_t_prev = in.v_t_prev;
  sample_.i_a_prev = in.i_a_prev;
  controller_step(ann1_, ann2_, sample_, cfg_.scaling);
  const double alpha_ann = sample_.alpha_k;

  const double error = in.w_ref - in.w_meas;
  const double change = first_ ? 0.0 : error - error_prev_;
  const std::array<double, 2> x{
      std::clamp(error / cfg_.supervisor.error_scale, -1.0, 1.0),
      std::clamp(change / cfg_.supervisor.delta_scale, -1.0, 1.0)};
  double correction = fuzzy_prev_;
  try {
    correction = fuzzy::ts_infer(supervisor_, x);
  } catch (const UncoveredInputError&) {
    // keep the previous correction
  }

  const double candidate = fuzzy_state_ + correction;
  const double unclamped = (1.0 - cfg_.blend) * alpha_ann + cfg_.blend * candidate;
  if (!((unclamped > 1.0 && correction > 0.0) || (unclamped < 0.0 && correction < 0.0))) {
    fuzzy_state_ = candidate;
  }
  const double alpha =
      std::clamp((1.0 - cfg_.blend) * alpha_ann + cfg_.blend * fuzzy_state_, 0.0, 1.0);
  sample_.alpha_k = alpha;
  error_prev_ = error;
  fuzzy_prev_ = correction;
  first_ = false;
  return alpha;
}

}  // namespace mldrive::control
