#include <gtest/gtest.h>

#include "refshape/config.hpp"
#include "refshape/errors.hpp"

using namespace refshape;

TEST(Config, DefaultsPerEnvironment) {
  const RunConfig hil = RunConfig::defaults(EnvKind::kHil);
  EXPECT_EQ(hil.train.episodes, 1000u);
  EXPECT_EQ(hil.eval_steps, 900u);
  EXPECT_EQ(hil.agent_hyper().action_low(0), -60.0);
  const RunConfig heat = RunConfig::defaults(EnvKind::kHeaters);
  EXPECT_EQ(heat.train.episodes, 2000u);
  EXPECT_EQ(heat.agent_hyper().action_high(0), 30.0);
  EXPECT_NO_THROW(hil.validate());
  EXPECT_NO_THROW(heat.validate());
}

TEST(Config, EmptyTextGivesHilDefaults) {
  const RunConfig c = RunConfig::parse("");
  EXPECT_EQ(c.to_ini(), RunConfig::defaults(EnvKind::kHil).to_ini());
}

TEST(Config, EnvKeySelectsDefaultsRegardlessOfPosition) {
  const RunConfig c = RunConfig::parse("[eval]\nseed = 4\n\n[run]\nenv = heaters\n");
  EXPECT_EQ(c.env, EnvKind::kHeaters);
  EXPECT_EQ(c.train.episodes, 2000u);
  EXPECT_EQ(c.eval_seed, 4u);
}

TEST(Config, IniRoundTrip) {
  for (EnvKind kind : {EnvKind::kHil, EnvKind::kHeaters}) {
    RunConfig c = RunConfig::defaults(kind);
    c.seed = 17;
    c.agent.actor_lr = 3.5e-5;
    c.eval_schedule = Schedule::parse("0:1.25, 7:-2");
    c.hil.gains = lqr_regression_fixture();
    const std::string text = c.to_ini();
    const RunConfig back = RunConfig::parse(text);
    EXPECT_EQ(back.to_ini(), text);
    EXPECT_EQ(back.seed, 17u);
    EXPECT_EQ(back.agent.actor_lr, 3.5e-5);
  }
}

TEST(Config, RewardSectionTargetsTheSelectedEnvironment) {
  const RunConfig c = RunConfig::parse("[run]\nenv = heaters\n[reward]\nalpha_g = 7\n");
  EXPECT_EQ(c.heaters.reward.alpha_g, 7.0);
  EXPECT_EQ(c.hil.reward.alpha_g, hil_reward_spec().alpha_g);
}

TEST(Config, ErrorsCarryLineNumbers) {
  const auto line_of = [](std::string_view text) {
    try {
      RunConfig::parse(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("[run]\nseed = 2\nbogus = 1\n"), 3);
  EXPECT_EQ(line_of("[run]\nseed = 2\nseed = 3\n"), 3);
  EXPECT_EQ(line_of("[agent]\n\ngamma = fast\n"), 3);
  EXPECT_EQ(line_of("seed = 1\n"), 1);
  EXPECT_EQ(line_of("[run\n"), 1);
  EXPECT_EQ(line_of("[run]\nenv = mars\n"), 2);
  EXPECT_EQ(line_of("[hil]\nw = 1, 2\n"), 2);
}

TEST(Config, ValidationRejectsInconsistentValues) {
  EXPECT_THROW(RunConfig::parse("[hil]\nsim_substep = 0.03\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[train]\nepisodes = 0\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("[run]\nenv = heaters\n[heaters]\npopulation = 0\n"),
               ConfigError);
  EXPECT_THROW(RunConfig::parse("[agent]\ngamma = 1.5\n"), ConfigError);
}

TEST(Config, MakeEnvHonoursHorizonAndPopulation) {
  RunConfig c = RunConfig::defaults(EnvKind::kHeaters);
  c.heaters.population = 9;
  const auto env = c.make_env(17);
  EXPECT_EQ(env->timing().horizon_steps, 17u);
  EXPECT_EQ(env->name(), "heaters");
  EXPECT_EQ(dynamic_cast<const HeatersEnv&>(*env).config().population, 9);
}
