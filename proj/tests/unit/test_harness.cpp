#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "refshape/errors.hpp"
#include "refshape/fp_env.hpp"
#include "refshape/harness.hpp"
#include "refshape/heaters.hpp"
#include "refshape/hil.hpp"

using namespace refshape;

namespace {

AgentHyper small_hyper(double lo, double hi, std::size_t batch = 4) {
  AgentHyper h;
  h.hidden_sizes = {8, 8};
  h.minibatch_size = batch;
  h.replay_capacity = 1000;
  h.action_low = Vector::Constant(1, lo);
  h.action_high = Vector::Constant(1, hi);
  return h;
}

HilConfig short_hil(std::size_t horizon) {
  HilConfig c;
  c.timing.horizon_steps = horizon;
  return c;
}

// Output becomes NaN after a few steps.
class PoisonEnv final : public Environment {
 public:
  std::string name() const override { return "poison"; }
  std::pair<double, double> action_range() const override { return {-1.0, 1.0}; }
  std::pair<double, double> training_goal_range() const override { return {-1.0, 1.0}; }
  const RewardSpec& reward_spec() const override { return spec_; }
  const EnvTiming& timing() const override { return timing_; }
  ObservationScaler observation_scaler() const override { return {}; }
  ConstraintLimits constraint_limits() const override { return {}; }

 protected:
  void reset_plant(std::uint64_t, ResetMode) override { n_ = 0; }
  void advance_plant(double) override { ++n_; }
  double plant_output() const override {
    return n_ >= 3 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  }

 private:
  RewardSpec spec_ = hil_reward_spec();
  EnvTiming timing_{0.1, 0.1, 10};
  int n_ = 0;
};

}  // namespace

TEST(LearningCurve, RollingAverageUsesTrailingWindow) {
  LearningCurve c(3);
  for (double r : {1.0, 2.0, 3.0, 4.0, 5.0}) c.push(r);
  EXPECT_DOUBLE_EQ(c.rolling(0), 1.0);
  EXPECT_DOUBLE_EQ(c.rolling(1), 1.5);
  EXPECT_DOUBLE_EQ(c.rolling(2), 2.0);
  EXPECT_DOUBLE_EQ(c.rolling(4), 4.0);
  EXPECT_DOUBLE_EQ(c.mean_rolling(3, 5), 3.5);
  EXPECT_THROW(c.mean_rolling(4, 4), ContractError);
  EXPECT_THROW(c.rolling(5), ContractError);
}

TEST(Train, NoUpdatesBeforeTheBufferHoldsAMinibatch) {
  HilEnv env(short_hil(3));
  Agent agent(kObservationDim, 1, small_hyper(-60, 60, 64), 1);
  TrainConfig cfg;
  cfg.episodes = 1;
  cfg.steps_per_episode = 3;
  const TrainResult r = train(env, agent, cfg);
  EXPECT_EQ(r.updates, 0u);
  EXPECT_EQ(agent.buffer().size(), 3u);
  EXPECT_EQ(r.curve.size(), 1u);
}

TEST(Train, CurveHasOneEntryPerEpisodeAndUpdatesStartAtBatchSize) {
  HilEnv env(short_hil(5));
  Agent agent(kObservationDim, 1, small_hyper(-60, 60, 4), 1);
  TrainConfig cfg;
  cfg.episodes = 3;
  cfg.steps_per_episode = 5;
  cfg.curve_window = 2;
  const TrainResult r = train(env, agent, cfg);
  EXPECT_EQ(r.curve.size(), 3u);
  EXPECT_EQ(r.updates, 15u - 3u);
  EXPECT_GE(r.best_episode, 2u);
}

TEST(Train, IsReproducibleForAFixedSeed) {
  const auto run = [] {
    HeatersConfig hc;
    hc.timing.horizon_steps = 6;
    HeatersEnv env(hc);
    Agent agent(kObservationDim, 1, small_hyper(0, 30), 7);
    TrainConfig cfg;
    cfg.episodes = 3;
    cfg.steps_per_episode = 6;
    cfg.seed = 7;
    return train(env, agent, cfg).curve;
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, NonFiniteRewardIsADivergence) {
  PoisonEnv env;
  Agent agent(kObservationDim, 1, small_hyper(-1, 1), 1);
  TrainConfig cfg;
  cfg.episodes = 2;
  cfg.steps_per_episode = 10;
  EXPECT_THROW(train(env, agent, cfg), DivergenceError);
}

TEST(Train, RejectsStepsBeyondTheHorizon) {
  HilEnv env(short_hil(3));
  Agent agent(kObservationDim, 1, small_hyper(-60, 60), 1);
  TrainConfig cfg;
  cfg.episodes = 1;
  cfg.steps_per_episode = 4;
  EXPECT_THROW(train(env, agent, cfg), ConfigError);
}

TEST(Evaluate, RowPerStepAndPassthroughEqualsBaseline) {
  HilEnv env(short_hil(40));
  const Schedule sched = Schedule::parse("0:5, 20:-3");
  const EvalReport base = baseline_evaluate(env, sched, 3);
  ASSERT_EQ(base.rows.size(), 40u);
  for (const EvalRow& row : base.rows) EXPECT_EQ(row.r_shaped, row.r_goal);
  const EvalReport again = rollout(env, passthrough_policy(), sched, 3);
  EXPECT_EQ(again, base);
  EXPECT_DOUBLE_EQ(base.rows.back().time, 4.0);
}

TEST(Evaluate, ExplorationStateDoesNotLeakIntoEvaluation) {
  HilEnv env(short_hil(20));
  Agent agent(kObservationDim, 1, small_hyper(-60, 60), 5);
  const Schedule sched = Schedule::constant(4.0);
  const EvalReport first = evaluate(env, agent, sched, 11);
  Vector obs = Vector::Zero(kObservationDim);
  for (int i = 0; i < 50; ++i) agent.act(obs, true);  // advance noise state
  const EvalReport second = evaluate(env, agent, sched, 11);
  EXPECT_EQ(first, second);
}

TEST(Evaluate, ActionsAreClampedToTheRange) {
  HilEnv env(short_hil(5));
  const Policy wild = [](const Vector&, const Environment&) { return 1e6; };
  const EvalReport r = rollout(env, wild, Schedule::constant(1.0), 1);
  for (const EvalRow& row : r.rows) EXPECT_EQ(row.r_shaped, 60.0);
}

TEST(Evaluate, ImprovementIsRelativeMaeReduction) {
  EvalReport base;
  base.rows.resize(4);
  base.mae = 2.0;
  EvalReport agent = base;
  agent.mae = 0.5;
  attach_baseline(agent, base);
  ASSERT_TRUE(agent.improvement_vs_baseline);
  EXPECT_DOUBLE_EQ(*agent.improvement_vs_baseline, 0.75);
  EvalReport shorter;
  shorter.rows.resize(3);
  EXPECT_THROW(attach_baseline(shorter, base), ContractError);
}

TEST(Evaluate, WithActorKeepsTheSnapshot) {
  Agent agent(kObservationDim, 1, small_hyper(-60, 60), 2);
  Network snapshot = agent.actor();
  snapshot.params.layers.back().weight.array() += 0.5;
  ++snapshot.params.generation;
  const Agent swapped = with_actor(agent, snapshot);
  const Vector obs = Vector::Constant(kObservationDim, 0.3);
  EXPECT_NE(swapped.policy(obs)(0), agent.policy(obs)(0));
  EXPECT_EQ(swapped.critic().params.layers[0].weight, agent.critic().params.layers[0].weight);
}

#ifdef REFSHAPE_HAVE_MXCSR
TEST(FlushDenormals, ScopedAndRestored) {
  volatile double tiny = 1e-300;
  volatile double scale = 1e-10;
  {
    const ScopedFlushDenormals ftz;
    EXPECT_EQ(tiny * scale, 0.0);
  }
  EXPECT_GT(tiny * scale, 0.0);
}
#endif
