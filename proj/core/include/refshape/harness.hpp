#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "refshape/agent.hpp"
#include "refshape/environment.hpp"

namespace refshape {

struct TrainConfig {
  std::size_t episodes = 1000;
  std::size_t steps_per_episode = 200;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 100;
  std::size_t curve_window = 50;
  // Checkpoints land here when set: latest.ckpt (every checkpoint_every
  // episodes), best.ckpt and final.ckpt.
  std::optional<std::filesystem::path> checkpoint_dir;

  void validate() const;
};

class LearningCurve {
 public:
  explicit LearningCurve(std::size_t window = 50);

  void push(double episode_reward);
  std::size_t size() const { return rewards_.size(); }
  std::size_t window() const { return window_; }
  const std::vector<double>& rewards() const { return rewards_; }
  // Mean of the last `window` rewards ending at episode i (fewer at the start).
  double rolling(std::size_t i) const;
  std::vector<double> rolling_average() const;
  // Mean rolling average over episodes [first, last), zero-based.
  double mean_rolling(std::size_t first, std::size_t last) const;

  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;

 private:
  std::size_t window_;
  std::vector<double> rewards_;
  std::vector<double> prefix_{0.0};
};

struct TrainResult {
  LearningCurve curve;
  Network best_actor;  // actor snapshot at the best rolling average
  std::size_t best_episode = 0;
  double best_rolling = 0.0;
  std::size_t updates = 0;
};

using EpisodeCallback = std::function<void(std::size_t episode, double reward, double rolling)>;

// DDPG over episodes: each episode draws a random goal and start, resets the
// OU process, then per step acts with exploration, stores the transition and
// runs one critic/actor/soft update once the replay holds a minibatch.
// Throws DivergenceError on a non-finite loss or reward.
TrainResult train(Environment& env, Agent& agent, const TrainConfig& config,
                  const EpisodeCallback& on_episode = {});

// Copy of `trained` whose actor is replaced by `actor`; empty replay.
Agent with_actor(const Agent& trained, const Network& actor);

struct EvalRow {
  std::size_t step = 0;
  double time = 0.0;  // end of the step, in plant time units
  double r_goal = 0.0;
  double r_shaped = 0.0;
  double y = 0.0;
  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double y0 = 0.0;
  double mae = 0.0;
  std::optional<double> improvement_vs_baseline;
  std::size_t bound_exceedances = 0;  // |y| > amplitude limit
  std::size_t rate_exceedances = 0;   // |y_t - y_{t-1}| > rate limit
  double max_abs_output = 0.0;
  double max_abs_rate = 0.0;
  // Per-household comfort violations summed over the rollout, when the plant has households.
  std::optional<std::size_t> household_violations;

  // Fraction of steps with |y| <= limit.
  double fraction_within_amplitude(double limit) const;
  // Fraction of steps with |y_t - y_{t-1}| <= limit.
  double fraction_within_rate(double limit) const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

using Policy = std::function<double(const Vector& observation, const Environment& env)>;
// Called after reset (steps_taken() == 0) and after every step.
using StepObserver = std::function<void(const Environment& env)>;

// Deterministic rollout of `policy` over the schedule for the env horizon.
// Actions are clamped to the action range.
EvalReport rollout(Environment& env, const Policy& policy, const Schedule& schedule,
                   std::uint64_t eval_seed, const StepObserver& observer = {});

// Exploration off; the agent is not modified.
EvalReport evaluate(Environment& env, const Agent& agent, const Schedule& schedule,
                    std::uint64_t eval_seed);
// Identity outer loop, r~_t = r_t.
EvalReport baseline_evaluate(Environment& env, const Schedule& schedule, std::uint64_t eval_seed);
Policy passthrough_policy();

// Sets report.improvement_vs_baseline = 1 - mae / baseline.mae.
void attach_baseline(EvalReport& report, const EvalReport& baseline);

}  // namespace refshape
