#pragma once

#include <optional>

#include "refshape/delay_line.hpp"
#include "refshape/environment.hpp"
#include "refshape/lqr.hpp"

namespace refshape {

// Neal-Schmidt pilot: xi' = a_h xi + b_h theta(t - delay), c = c_h xi + d_h theta(t - delay).
struct PilotParams {
  double a_h = -0.2;
  double b_h = 1.0;
  double c_h = 0.08;
  double d_h = 0.1;
  double delay = 0.5;  // seconds
};

// Linearized longitudinal dynamics x' = A x + B (u + delta(x)), states in crad
// and crad/s, pitch angle x4. delta(x) = W' [1, x1, x2].
struct AircraftParams {
  Matrix a;  // 4x4
  Vector b;  // 4
  Vector w;  // 3
  Matrix q;  // 5x5 LQR state weight on [x, x_c]
  double r = 10.0;

  // Values as tabulated, W included.
  static AircraftParams boeing747();
  void validate() const;
};

struct LqrGains {
  Vector k1;  // 4
  double k2 = 0.0;
};

enum class HilScenario {
  kNominal,  // u = -K1 x(t) - K2 x_c(t)
  kDelayed,  // u = -K1 x(t - d1) - K2 x_c(t - d2)
};

// Augmented design model over [x, x_c] with x_c' = x4 - c, c exogenous.
Matrix hil_augmented_a(const AircraftParams& p);
Matrix hil_augmented_b(const AircraftParams& p);
LqrGains design_lqr(const AircraftParams& p, const RiccatiOptions& options = {});
// Gains for the tabulated aircraft computed once with an independent CARE solver.
LqrGains lqr_regression_fixture();

// Delayed signals seen by the pilot and the inner controller at one instant.
struct HilDelayedInputs {
  double theta = 0.0;  // r~(t - tau) - x4(t - tau)
  Eigen::Vector4d x_ctrl = Eigen::Vector4d::Zero();
  double xc_ctrl = 0.0;
};

// State layout [x1, x2, x3, x4, xi, x_c]. Returns its time derivative.
Vector hil_derivatives(const Vector& state, const HilDelayedInputs& delayed,
                       const PilotParams& pilot, const AircraftParams& aircraft,
                       const LqrGains& gains);

struct HilConfig {
  PilotParams pilot;
  AircraftParams aircraft = default_aircraft();
  HilScenario scenario = HilScenario::kNominal;
  double controller_state_delay = 5.7;      // d1, seconds
  double controller_integral_delay = 0.57;  // d2, seconds
  EnvTiming timing{0.1, 0.01, 200};
  double action_low = -60.0;
  double action_high = 60.0;
  double init_pitch_low = -5.0;
  double init_pitch_high = 5.0;
  double goal_low = -15.0;
  double goal_high = 15.0;
  double observation_scale = 20.0;
  RewardSpec reward = hil_reward_spec();
  std::optional<LqrGains> gains;  // imported gains; designed when empty

  // Table values with the sign of W flipped. The tabulated W gives the
  // nominal closed loop an eigenvalue at +0.357 1/s.
  static AircraftParams default_aircraft();
  void validate() const;
};

class HilEnv final : public Environment {
 public:
  explicit HilEnv(HilConfig config);

  std::string name() const override { return "hil"; }
  std::pair<double, double> action_range() const override {
    return {config_.action_low, config_.action_high};
  }
  std::pair<double, double> training_goal_range() const override {
    return {config_.goal_low, config_.goal_high};
  }
  const RewardSpec& reward_spec() const override { return config_.reward; }
  const EnvTiming& timing() const override { return config_.timing; }
  ObservationScaler observation_scaler() const override { return {0.0, config_.observation_scale}; }
  ConstraintLimits constraint_limits() const override { return {config_.reward.bound_l, {}}; }

  const HilConfig& config() const { return config_; }
  const LqrGains& gains() const { return gains_; }
  const Vector& state() const { return state_; }
  double time() const { return time_; }
  // theta(t - tau) as the pilot perceives it at the current instant.
  double perceived_error() const;
  // Sets the initial pitch used by the next evaluation reset.
  void set_evaluation_pitch(double pitch) { eval_pitch_ = pitch; }

 protected:
  void reset_plant(std::uint64_t seed, ResetMode mode) override;
  void advance_plant(double shaped_reference) override;
  double plant_output() const override { return state_(3); }

 private:
  struct Sample {
    Eigen::Matrix<double, 6, 1> state;
    Eigen::Matrix<double, 6, 1> deriv;
    double r_held = 0.0;
  };
  struct Delayed {
    Eigen::Matrix<double, 6, 1> state;
    double r_held;
  };

  void substep();
  // History value `delay` substeps behind the stage at `stage` (0: start,
  // 1: midpoint, 2: end of the current substep). `pending` is true while the
  // current grid sample has not been pushed yet.
  Delayed delayed_at(std::size_t delay, int stage, const Vector& stage_state, bool pending) const;
  HilDelayedInputs inputs_at(int stage, const Vector& stage_state, bool pending) const;

  HilConfig config_;
  LqrGains gains_;
  std::size_t pilot_delay_ = 0;
  std::size_t state_delay_ = 0;
  std::size_t integral_delay_ = 0;
  std::size_t substeps_ = 0;
  DelayLine<Sample> history_;
  Vector state_ = Vector::Zero(6);
  double time_ = 0.0;
  double r_held_ = 0.0;
  double eval_pitch_ = 0.0;
};

}  // namespace refshape
