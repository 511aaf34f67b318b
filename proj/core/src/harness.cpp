#include "refshape/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "refshape/errors.hpp"
#include "refshape/fp_env.hpp"
#include "refshape/heaters.hpp"
#include "refshape/reward.hpp"
#include "refshape/rng.hpp"

namespace refshape {

namespace {
constexpr std::uint64_t kEpisodeDraws = 21;
}  // namespace

void TrainConfig::validate() const {
  if (episodes < 1) throw ConfigError("train: episodes must be >= 1");
  if (steps_per_episode < 1) throw ConfigError("train: steps_per_episode must be >= 1");
  if (curve_window < 1) throw ConfigError("train: curve_window must be >= 1");
}

LearningCurve::LearningCurve(std::size_t window) : window_(std::max<std::size_t>(window, 1)) {}

void LearningCurve::push(double episode_reward) {
  rewards_.push_back(episode_reward);
  prefix_.push_back(prefix_.back() + episode_reward);
}

double LearningCurve::rolling(std::size_t i) const {
  if (i >= rewards_.size()) throw ContractError("learning curve: episode out of range");
  const std::size_t first = i + 1 >= window_ ? i + 1 - window_ : 0;
  return (prefix_[i + 1] - prefix_[first]) / static_cast<double>(i + 1 - first);
}

std::vector<double> LearningCurve::rolling_average() const {
  std::vector<double> out(rewards_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rolling(i);
  return out;
}

double LearningCurve::mean_rolling(std::size_t first, std::size_t last) const {
  if (first >= last || last > rewards_.size()) {
    throw ContractError("learning curve: empty or out-of-range episode window");
  }
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += rolling(i);
  return sum / static_cast<double>(last - first);
}

TrainResult train(Environment& env, Agent& agent, const TrainConfig& config,
                  const EpisodeCallback& on_episode) {
  config.validate();
  const ScopedFlushDenormals ftz;
  if (agent.obs_dim() != kObservationDim || agent.act_dim() != 1) {
    throw ShapeError("train: agent dimensions do not match the environment");
  }
  if (config.steps_per_episode > env.timing().horizon_steps) {
    throw ConfigError("train: steps_per_episode exceeds the environment horizon");
  }
  if (config.checkpoint_dir) std::filesystem::create_directories(*config.checkpoint_dir);

  TrainResult result{LearningCurve(config.curve_window), agent.actor(), 0, 0.0, 0};
  bool have_best = false;
  auto draws = seeded_stream(config.seed, kEpisodeDraws);
  const RewardSpec& spec = env.reward_spec();

  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    Vector obs = env.reset_training(draws);
    agent.begin_episode();
    double total = 0.0;
    for (std::size_t t = 0; t < config.steps_per_episode; ++t) {
      const Vector action = agent.act(obs, true);
      const StepResult step = env.step(action(0));
      const RewardInputs& in = step.reward_inputs;
      const double r = reward(spec, in.r_goal, in.y, in.y_prev, in.r_shaped, in.r_shaped_prev);
      if (!std::isfinite(r)) {
        throw DivergenceError("train: non-finite reward at episode " + std::to_string(episode + 1));
      }
      agent.store({obs, action, r, step.observation});
      if (const auto loss = agent.train_step()) {
        ++result.updates;
        if (!std::isfinite(*loss)) {
          throw DivergenceError("train: non-finite critic loss at episode " +
                                std::to_string(episode + 1) + ", step " + std::to_string(t + 1));
        }
      }
      total += r;
      obs = step.observation;
    }
    result.curve.push(total);
    const double rolling = result.curve.rolling(episode);
    const bool window_full = episode + 1 >= std::min(config.curve_window, config.episodes);
    if (window_full && (!have_best || rolling > result.best_rolling)) {
      have_best = true;
      result.best_rolling = rolling;
      result.best_episode = episode + 1;
      result.best_actor = agent.actor();
    }
    if (config.checkpoint_dir && (episode + 1) % config.checkpoint_every == 0) {
      save_checkpoint(agent, *config.checkpoint_dir / "latest.ckpt");
    }
    if (on_episode) on_episode(episode + 1, total, rolling);
  }

  if (config.checkpoint_dir) {
    save_checkpoint(agent, *config.checkpoint_dir / "final.ckpt");
    save_checkpoint(with_actor(agent, result.best_actor), *config.checkpoint_dir / "best.ckpt");
  }
  return result;
}

Agent with_actor(const Agent& trained, const Network& actor) {
  if (!(actor.spec == trained.actor().spec)) {
    throw ShapeError("with_actor: actor architecture does not match the agent");
  }
  Agent out(trained.obs_dim(), trained.act_dim(), trained.hyper(), 0);
  out.actor() = actor;
  out.critic() = trained.critic();
  out.target_actor() = trained.target_actor();
  out.target_critic() = trained.target_critic();
  return out;
}

double EvalReport::fraction_within_amplitude(double limit) const {
  if (rows.empty()) return 1.0;
  const auto n = std::count_if(rows.begin(), rows.end(),
                               [&](const EvalRow& r) { return std::abs(r.y) <= limit; });
  return static_cast<double>(n) / static_cast<double>(rows.size());
}

double EvalReport::fraction_within_rate(double limit) const {
  if (rows.empty()) return 1.0;
  std::size_t n = 0;
  double prev = y0;
  for (const EvalRow& r : rows) {
    if (std::abs(r.y - prev) <= limit) ++n;
    prev = r.y;
  }
  return static_cast<double>(n) / static_cast<double>(rows.size());
}

EvalReport rollout(Environment& env, const Policy& policy, const Schedule& schedule,
                   std::uint64_t eval_seed, const StepObserver& observer) {
  Vector obs = env.reset(schedule, eval_seed, ResetMode::kEvaluation);
  if (observer) observer(env);
  const auto [lo, hi] = env.action_range();
  const ConstraintLimits limits = env.constraint_limits();
  const double period = env.timing().agent_period;

  EvalReport report;
  report.y0 = env.output();
  double prev = report.y0;
  double abs_sum = 0.0;
  while (!env.done()) {
    const double goal = env.current_goal();
    const double action = std::clamp(policy(obs, env), lo, hi);
    const StepResult step = env.step(action);
    const double y = step.reward_inputs.y;
    EvalRow row;
    row.step = report.rows.size();
    row.time = static_cast<double>(report.rows.size() + 1) * period;
    row.r_goal = goal;
    row.r_shaped = action;
    row.y = y;
    report.rows.push_back(row);

    abs_sum += std::abs(goal - y);
    const double rate = std::abs(y - prev);
    report.max_abs_output = std::max(report.max_abs_output, std::abs(y));
    report.max_abs_rate = std::max(report.max_abs_rate, rate);
    if (limits.amplitude && std::abs(y) > *limits.amplitude) ++report.bound_exceedances;
    if (limits.rate_per_step && rate > *limits.rate_per_step) ++report.rate_exceedances;
    prev = y;
    obs = step.observation;
    if (observer) observer(env);
  }
  report.mae = report.rows.empty() ? 0.0 : abs_sum / static_cast<double>(report.rows.size());
  if (const auto* heaters = dynamic_cast<const HeatersEnv*>(&env)) {
    std::size_t total = 0;
    for (std::size_t v : heaters->violations_per_household()) total += v;
    report.household_violations = total;
  }
  return report;
}

EvalReport evaluate(Environment& env, const Agent& agent, const Schedule& schedule,
                    std::uint64_t eval_seed) {
  const Policy policy = [&agent](const Vector& obs, const Environment&) {
    return agent.policy(obs)(0);
  };
  return rollout(env, policy, schedule, eval_seed);
}

Policy passthrough_policy() {
  return [](const Vector&, const Environment& env) { return env.current_goal(); };
}

EvalReport baseline_evaluate(Environment& env, const Schedule& schedule,
                             std::uint64_t eval_seed) {
  return rollout(env, passthrough_policy(), schedule, eval_seed);
}

void attach_baseline(EvalReport& report, const EvalReport& baseline) {
  if (report.rows.size() != baseline.rows.size()) {
    throw ContractError("attach_baseline: reports cover different horizons");
  }
  report.improvement_vs_baseline =
      baseline.mae > 0.0 ? std::optional<double>(1.0 - report.mae / baseline.mae) : std::nullopt;
}

}  // namespace refshape
