#include "mldrive/simulation.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mldrive/errors.hpp"

namespace mldrive::sim {

void validate(const DriveConfig& cfg) {
  plant::validate(cfg.motor);
  modulation::validate(cfg.modulation);
  inverter::validate(cfg.inverter);
  if (cfg.inverter.levels_m != cfg.modulation.levels_m) {
    throw ConfigurationError("inverter and modulator level counts differ");
  }
  if (cfg.steps_per_carrier < 20) {
    throw ConfigurationError("steps_per_carrier must be >= 20 to resolve the carrier");
  }
  if (!(cfg.duration > 0.0) || !(cfg.tau_imax > 0.0) || cfg.i_limit < 0.0 ||
      cfg.load_quadratic < 0.0 || cfg.trajectory_stride == 0 || !(cfg.settle_window > 0.0) ||
      cfg.settle_window > cfg.duration) {
    throw ConfigurationError("drive timing, load or current-limit settings are invalid");
  }
}

DriveResult simulate_drive(const DriveConfig& cfg, control::SpeedController& controller) {
  validate(cfg);
  controller.reset();

  const double dt = cfg.dt();
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));
  const auto settle_steps = static_cast<std::size_t>(std::llround(cfg.settle_window / dt));
  const auto per_tick = static_cast<std::size_t>(cfg.steps_per_carrier);
  const double omega_e = 2.0 * std::numbers::pi * cfg.modulation.f_m;

  modulation::ModulationConfig mod = cfg.modulation;
  plant::MotorState state;
  current_loop::CurrentLoopState loop;
  // start with the current limiter fully open
  loop.integrator = 1.0 / cfg.current_gains.ki;

  DriveResult result;
  result.ticks.reserve(n_steps / per_tick + 1);
  result.trajectory.reserve(n_steps / cfg.trajectory_stride + 1);

  double v_t_prev = 0.0;
  double i_a_prev = 0.0;
  double m_a = 0.0;
  double settle_sum = 0.0;

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    if (n % per_tick == 0) {
      // a zero speed reference disables the drive
      const double alpha = cfg.w_ref != 0.0
                               ? controller.step({cfg.w_ref, state.omega, v_t_prev, i_a_prev})
                               : 0.0;
      const double limit = current_loop::current_controller(
          cfg.i_limit, loop.i_max_est, cfg.current_gains, cfg.tick_period(), loop);
      m_a = alpha * limit;
      result.ticks.push_back({t, cfg.w_ref, state.omega, v_t_prev, i_a_prev, alpha, m_a});
      v_t_prev = m_a * 0.5 * cfg.inverter.v_dc_total;
      i_a_prev = loop.i_max_est;
    }

    mod.m_a = m_a;
    const double v =
        m_a > 0.0 ? inverter::level_voltage(modulation::level_at(t, mod), cfg.inverter) : 0.0;
    const double load = cfg.load_quadratic * state.omega * std::abs(state.omega) +
                        (t >= cfg.load_step_time ? cfg.load_step : 0.0);

    if (n % cfg.trajectory_stride == 0) {
      result.trajectory.push_back(
          {t, state.omega, state.i, v, plant::electrical_torque(state.i, cfg.motor)});
    }

    state = plant::step_motor(state, v, load, cfg.motor, dt);
    current_loop::extract_imax(current_loop::quasi_square_currents(state.i, omega_e * t), loop,
                               dt, cfg.tau_imax);

    result.iae += std::abs(cfg.w_ref - state.omega) * dt;
    result.peak_speed = std::max(result.peak_speed, state.omega);
    if (n + settle_steps >= n_steps) settle_sum += state.omega;
  }

  result.steady_speed = settle_sum / static_cast<double>(std::max<std::size_t>(settle_steps, 1));
  result.steady_error_pct =
      cfg.w_ref != 0.0 ? 100.0 * std::abs(result.steady_speed - cfg.w_ref) / std::abs(cfg.w_ref)
                       : 0.0;
  return result;
}

control::PiSpeedController make_teacher(const DriveConfig& drive, const TrainingConfig& cfg) {
  return control::PiSpeedController(cfg.teacher_kp, cfg.teacher_ki, drive.tick_period());
}

TrainedController train_controller(const DriveConfig& drive, const TrainingConfig& cfg,
                                   const control::InputScaling& scaling) {
  if (cfg.speeds.empty()) throw ConfigurationError("training needs at least one speed");

  nn::Dataset estimator_data;
  std::vector<TickRecord> ticks;
  for (double speed : cfg.speeds) {
    DriveConfig run = drive;
    run.w_ref = speed;
    auto teacher = make_teacher(drive, cfg);
    auto result = simulate_drive(run, teacher);
    for (const auto& tick : result.ticks) {
      estimator_data.push_back({{tick.w_ref / scaling.speed, tick.v_t_prev / scaling.voltage,
                                 tick.i_a_prev / scaling.current},
                                {tick.w_meas / scaling.speed}});
      ticks.push_back(tick);
    }
  }

  nn::TrainOptions options;
  options.momentum = cfg.momentum;
  options.batch_size = cfg.batch_size;
  options.shuffle_seed = cfg.seed;

  const std::array<std::size_t, 3> dims1{3, cfg.ann1_hidden, 1};
  auto ann1 = nn::train_backprop(nn::make_mlp(dims1, cfg.seed), estimator_data, cfg.lr,
                                 cfg.epochs, options);

  nn::Dataset command_data;
  command_data.reserve(ticks.size());
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    auto input = estimator_data[i].input;
    input.push_back(nn::mlp_forward(ann1.net, estimator_data[i].input)[0]);
    command_data.push_back({std::move(input), {ticks[i].alpha}});
  }
  const std::array<std::size_t, 3> dims2{4, cfg.ann2_hidden, 1};
  options.shuffle_seed = cfg.seed + 1;
  auto ann2 = nn::train_backprop(nn::make_mlp(dims2, cfg.seed + 1), command_data, cfg.lr,
                                 cfg.epochs, options);

  TrainedController out;
  out.ann1 = std::move(ann1.net);
  out.ann2 = std::move(ann2.net);
  out.ann1_loss = std::move(ann1.loss_history);
  out.ann2_loss = std::move(ann2.loss_history);
  out.samples = ticks.size();
  return out;
}

}  // namespace mldrive::sim
