#include "refshape/hil.hpp"

#include <algorithm>
#include <cmath>

#include "refshape/errors.hpp"
#include "refshape/integrators.hpp"
#include "refshape/rng.hpp"

namespace refshape {

AircraftParams AircraftParams::boeing747() {
  AircraftParams p;
  p.a = from_rows(4, 4,
                  {-0.003, 0.039, 0.0, -0.322,  //
                   -0.065, -0.319, 7.740, 0.0,  //
                   0.020, -0.101, -0.429, 0.0,  //
                   0.0, 0.0, 1.0, 0.0});
  p.b = Vector(4);
  p.b << 0.010, -0.180, -1.160, 0.0;
  p.w = Vector(3);
  p.w << 0.1, 0.3, -0.3;
  p.q = Vector((Vector(5) << 0.0, 0.0, 0.0, 1.0, 2.5).finished()).asDiagonal();
  p.r = 10.0;
  return p;
}

void AircraftParams::validate() const {
  if (a.rows() != 4 || a.cols() != 4 || b.size() != 4 || w.size() != 3 || q.rows() != 5 ||
      q.cols() != 5) {
    throw ConfigError("aircraft: A must be 4x4, B 4, W 3, Q 5x5");
  }
  if ((q.diagonal().array() < 0.0).any()) throw ConfigError("aircraft: Q diagonal must be >= 0");
  if (!(r > 0.0)) throw ConfigError("aircraft: R must be > 0");
}

AircraftParams HilConfig::default_aircraft() {
  AircraftParams p = AircraftParams::boeing747();
  p.w = -p.w;
  return p;
}

void HilConfig::validate() const {
  aircraft.validate();
  timing.validate();
  if (!(pilot.delay >= 0.0)) throw ConfigError("hil: pilot delay must be >= 0");
  if (!(action_low < action_high)) throw ConfigError("hil: action_low must be < action_high");
  if (!(goal_low <= goal_high)) throw ConfigError("hil: goal_low must be <= goal_high");
  if (goal_low < action_low || goal_high > action_high) {
    throw ConfigError("hil: goal range must lie inside the action range");
  }
  if (!(init_pitch_low <= init_pitch_high)) throw ConfigError("hil: initial pitch range");
  if (!(observation_scale > 0.0)) throw ConfigError("hil: observation_scale must be > 0");
  reward.validate();
  if (gains && gains->k1.size() != 4) throw ConfigError("hil: imported K1 must have 4 entries");
}

Matrix hil_augmented_a(const AircraftParams& p) {
  Matrix a = Matrix::Zero(5, 5);
  a.topLeftCorner(4, 4) = p.a;
  a(4, 3) = 1.0;
  return a;
}

Matrix hil_augmented_b(const AircraftParams& p) {
  Matrix b = Matrix::Zero(5, 1);
  b.topRows(4) = p.b;
  return b;
}

LqrGains design_lqr(const AircraftParams& p, const RiccatiOptions& options) {
  p.validate();
  const auto sol = solve_lqr(hil_augmented_a(p), hil_augmented_b(p), p.q,
                             Matrix::Constant(1, 1, p.r), options);
  LqrGains g;
  g.k1 = sol.k.row(0).head(4).transpose();
  g.k2 = sol.k(0, 4);
  return g;
}

LqrGains lqr_regression_fixture() {
  LqrGains g;
  g.k1 = Vector(4);
  g.k1 << -0.020141978810959488, 0.07273815356974489, -0.79113164954719883, -1.2638163711768993;
  g.k2 = -0.50000000000000255;
  return g;
}

Vector hil_derivatives(const Vector& state, const HilDelayedInputs& delayed,
                       const PilotParams& pilot, const AircraftParams& aircraft,
                       const LqrGains& gains) {
  const auto x = state.head<4>();
  const double xi = state(4);
  const double u = -gains.k1.dot(delayed.x_ctrl) - gains.k2 * delayed.xc_ctrl;
  const double uncertainty = aircraft.w(0) + aircraft.w(1) * x(0) + aircraft.w(2) * x(1);
  const double command = pilot.c_h * xi + pilot.d_h * delayed.theta;

  Vector d(6);
  d.head<4>() = aircraft.a * x + aircraft.b * (u + uncertainty);
  d(4) = pilot.a_h * xi + pilot.b_h * delayed.theta;
  d(5) = x(3) - command;
  return d;
}

HilEnv::HilEnv(HilConfig config)
    : config_(std::move(config)), history_(1, Sample{}) {
  config_.validate();
  gains_ = config_.gains ? *config_.gains : design_lqr(config_.aircraft);
  const double dt = config_.timing.sim_substep;
  pilot_delay_ = delay_in_substeps(config_.pilot.delay, dt, "pilot");
  state_delay_ = delay_in_substeps(config_.controller_state_delay, dt, "controller state");
  integral_delay_ = delay_in_substeps(config_.controller_integral_delay, dt, "controller integral");
  substeps_ = config_.timing.substeps_per_step();
  const std::size_t longest = std::max({pilot_delay_, state_delay_, integral_delay_, std::size_t{1}});
  history_ = DelayLine<Sample>(longest, Sample{});
}

void HilEnv::reset_plant(std::uint64_t seed, ResetMode mode) {
  double pitch = eval_pitch_;
  if (mode == ResetMode::kTraining) {
    auto rng = seeded_stream(seed, 1);
    std::uniform_real_distribution<double> dist(config_.init_pitch_low, config_.init_pitch_high);
    pitch = dist(rng);
  }
  state_.setZero();
  state_(3) = pitch;
  time_ = 0.0;
  r_held_ = pitch;
  // At rest before t = 0, with the pilot seeing zero error.
  Sample fill;
  fill.state = state_;
  fill.deriv.setZero();
  fill.r_held = pitch;
  history_.reset(fill);
}

HilEnv::Delayed HilEnv::delayed_at(std::size_t delay, int stage, const Vector& stage_state,
                                   bool pending) const {
  if (delay == 0) return {stage_state, r_held_};
  const std::size_t shift = pending ? 1 : 0;
  const Sample& left = history_.read(delay - shift);
  if (stage == 0) return {left.state, left.r_held};
  const Sample& right = history_.read(delay - 1 - shift);
  if (stage == 2) return {right.state, left.r_held};
  // Cubic Hermite midpoint of the interval [left, right].
  const double h = config_.timing.sim_substep;
  Eigen::Matrix<double, 6, 1> mid =
      0.5 * (left.state + right.state) + (h / 8.0) * (left.deriv - right.deriv);
  return {mid, left.r_held};
}

HilDelayedInputs HilEnv::inputs_at(int stage, const Vector& stage_state, bool pending) const {
  HilDelayedInputs in;
  const auto pilot = delayed_at(pilot_delay_, stage, stage_state, pending);
  in.theta = pilot.r_held - pilot.state(3);
  if (config_.scenario == HilScenario::kDelayed) {
    in.x_ctrl = delayed_at(state_delay_, stage, stage_state, pending).state.head<4>();
    in.xc_ctrl = delayed_at(integral_delay_, stage, stage_state, pending).state(5);
  } else {
    in.x_ctrl = stage_state.head<4>();
    in.xc_ctrl = stage_state(5);
  }
  return in;
}

double HilEnv::perceived_error() const {
  if (pilot_delay_ == 0) return r_held_ - state_(3);
  const Sample& s = history_.read(pilot_delay_ - 1);
  return s.r_held - s.state(3);
}

void HilEnv::substep() {
  const double h = config_.timing.sim_substep;
  const double t0 = time_;
  Sample now;
  now.state = state_;
  now.r_held = r_held_;
  now.deriv = hil_derivatives(state_, inputs_at(0, state_, true), config_.pilot, config_.aircraft,
                              gains_);
  history_.push(now);

  const Derivative f = [&](double t, const Vector& s) {
    const double offset = t - t0;
    const int stage = offset < 0.25 * h ? 0 : (offset < 0.75 * h ? 1 : 2);
    return hil_derivatives(s, inputs_at(stage, s, false), config_.pilot, config_.aircraft, gains_);
  };
  state_ = rk4_step(f, state_, t0, h);
  time_ = t0 + h;
}

void HilEnv::advance_plant(double shaped_reference) {
  r_held_ = shaped_reference;
  for (std::size_t k = 0; k < substeps_; ++k) substep();
  if (!state_.allFinite()) throw SimulationFault("hil: state became non-finite");
}

}  // namespace refshape
