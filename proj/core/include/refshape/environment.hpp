#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refshape/linalg.hpp"
#include "refshape/reward.hpp"

namespace refshape {

// Observation layout: [y_t, y_{t-1}, r_t, r~_{t-1}, e_t].
inline constexpr Index kObservationDim = 5;

struct RawObservation {
  double y = 0.0;
  double y_prev = 0.0;
  double r_goal = 0.0;
  double r_shaped_prev = 0.0;
  double abs_error = 0.0;
};

// Fixed affine normalization: levels map to (v - offset) / scale, the error to e / scale.
struct ObservationScaler {
  double offset = 0.0;
  double scale = 1.0;

  Vector normalize(const RawObservation& raw) const;
  RawObservation denormalize(const Vector& obs) const;
};

// Piecewise-constant goal reference indexed by agent step.
class Schedule {
 public:
  struct Segment {
    std::size_t start_step = 0;
    double value = 0.0;
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  Schedule() : Schedule(std::vector<Segment>{{0, 0.0}}) {}
  explicit Schedule(std::vector<Segment> segments);
  static Schedule constant(double value) { return Schedule({{0, value}}); }

  // Parses "0:15, 300:-12, 600:10" (start_step:value pairs).
  static Schedule parse(std::string_view text);
  std::string to_string() const;

  double at(std::size_t step) const;
  const std::vector<Segment>& segments() const { return segments_; }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<Segment> segments_;
};

struct EnvTiming {
  double agent_period = 0.1;
  double sim_substep = 0.01;
  std::size_t horizon_steps = 200;

  // agent_period / sim_substep; ConfigError unless it is a positive integer.
  std::size_t substeps_per_step() const;
  void validate() const;
};

// Converts a delay in time units to a whole number of substeps.
std::size_t delay_in_substeps(double delay, double sim_substep, const char* what);

struct RewardInputs {
  double y = 0.0;
  double y_prev = 0.0;
  double r_goal = 0.0;
  double r_shaped = 0.0;
  double r_shaped_prev = 0.0;
};

struct StepResult {
  Vector observation;
  RewardInputs reward_inputs;
  bool done = false;
};

enum class ResetMode {
  kTraining,    // randomized initial condition
  kEvaluation,  // nominal initial condition
};

struct ConstraintLimits {
  std::optional<double> amplitude;      // |y| limit
  std::optional<double> rate_per_step;  // |y_t - y_{t-1}| limit per agent step
};

// Outer-loop view of an inner-loop plant: the agent sets the shaped reference,
// the plant is simulated for one agent period with that reference held
// constant, and only the output is observed.
class Environment {
 public:
  virtual ~Environment() = default;

  Vector reset(const Schedule& goal, std::uint64_t seed, ResetMode mode);
  // Constant goal drawn uniformly from training_goal_range(); randomized start.
  Vector reset_training(std::mt19937_64& rng);
  // Throws ContractError after done or before reset, or when the action is
  // outside action_range().
  StepResult step(double shaped_reference);

  double current_goal() const;
  double output() const { return plant_output(); }
  std::size_t steps_taken() const { return step_; }
  bool done() const { return active_ && step_ >= timing().horizon_steps; }
  RawObservation raw_observation() const;

  virtual std::string name() const = 0;
  virtual std::pair<double, double> action_range() const = 0;
  virtual std::pair<double, double> training_goal_range() const = 0;
  virtual const RewardSpec& reward_spec() const = 0;
  virtual const EnvTiming& timing() const = 0;
  virtual ObservationScaler observation_scaler() const = 0;
  virtual ConstraintLimits constraint_limits() const = 0;

 protected:
  virtual void reset_plant(std::uint64_t seed, ResetMode mode) = 0;
  // Simulates one agent period with the shaped reference held (zero-order hold).
  virtual void advance_plant(double shaped_reference) = 0;
  virtual double plant_output() const = 0;

 private:
  Schedule goal_;
  std::size_t step_ = 0;
  bool active_ = false;
  double y_prev_ = 0.0;
  double r_shaped_prev_ = 0.0;
};

}  // namespace refshape
