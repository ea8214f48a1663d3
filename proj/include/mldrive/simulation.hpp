#pragma once

#include <cstdint>
#include <vector>

#include "mldrive/controller.hpp"
#include "mldrive/current_loop.hpp"
#include "mldrive/inverter.hpp"
#include "mldrive/modulation.hpp"
#include "mldrive/plant.hpp"

namespace mldrive::sim {

// Closed-loop drive: speed controller -> alpha, current loop -> amplitude
// limit, m_a = alpha * limit, modulator -> inverter level voltage -> plant.
// Control ticks run once per carrier period.
struct DriveConfig {
  plant::MotorParams motor;
  modulation::ModulationConfig modulation;
  inverter::InverterConfig inverter;
  current_loop::CurrentGains current_gains;
  double tau_imax = 0.2;        // s, I_MAX filter time constant (10 / f_m)
  double i_limit = 12.0;        // A, current loop reference
  int steps_per_carrier = 40;   // plant steps per carrier period (>= 20)
  double duration = 1.5;        // s
  double w_ref = 100.0;         // rad/s, applied as a step at t = 0
  double load_quadratic = 1e-4; // N m s^2, fan-type load k w |w|
  double load_step = 0.0;       // N m, constant load added at load_step_time
  double load_step_time = 0.0;  // s
  std::size_t trajectory_stride = 40;
  double settle_window = 0.2;   // s averaged for the steady-state speed

  double dt() const { return 1.0 / (modulation.f_c * steps_per_carrier); }
  double tick_period() const { return 1.0 / modulation.f_c; }
};

void validate(const DriveConfig& cfg);

struct TickRecord {
  double t = 0.0;
  double w_ref = 0.0;
  double w_meas = 0.0;
  double v_t_prev = 0.0;
  double i_a_prev = 0.0;
  double alpha = 0.0;
  double m_a = 0.0;
};

struct DriveResult {
  std::vector<plant::TrajectoryRow> trajectory;
  std::vector<TickRecord> ticks;
  double iae = 0.0;               // integral of |w_ref - w| dt, rad
  double steady_speed = 0.0;      // mean speed over the settle window
  double steady_error_pct = 0.0;  // 100 |steady - w_ref| / w_ref
  double peak_speed = 0.0;
};

DriveResult simulate_drive(const DriveConfig& cfg, control::SpeedController& controller);

struct TrainingConfig {
  std::vector<double> speeds{40.0, 60.0, 80.0, 100.0, 120.0, 140.0};
  double teacher_kp = 0.1;  // per rad/s
  double teacher_ki = 1.0;  // per rad
  std::size_t ann1_hidden = 8;
  std::size_t ann2_hidden = 10;
  double lr = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double momentum = 0.9;
  std::uint64_t seed = 1;
};

struct TrainedController {
  nn::Mlp ann1;
  nn::Mlp ann2;
  std::vector<double> ann1_loss;
  std::vector<double> ann2_loss;
  std::size_t samples = 0;
};

control::PiSpeedController make_teacher(const DriveConfig& drive, const TrainingConfig& cfg);

// Harvests ticks from teacher-driven runs at each training speed, trains
// ANN1 on the measured speed, then ANN2 on the teacher's command with ANN1's
// estimate as its fourth input.
TrainedController train_controller(const DriveConfig& drive, const TrainingConfig& cfg,
                                   const control::InputScaling& scaling);

}  // namespace mldrive::sim
