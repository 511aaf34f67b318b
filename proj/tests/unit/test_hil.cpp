#include <gtest/gtest.h>

#include <cmath>

#include "refshape/errors.hpp"
#include "refshape/hil.hpp"
#include "refshape/verification.hpp"

using namespace refshape;

namespace {

HilConfig linear_config() {
  HilConfig c;
  c.aircraft.w.setZero();
  return c;
}

std::vector<double> run_outputs(HilConfig cfg, const Schedule& r, double pitch0 = 0.0) {
  HilEnv env(cfg);
  env.set_evaluation_pitch(pitch0);
  env.reset(r, 0, ResetMode::kEvaluation);
  std::vector<double> ys;
  std::size_t k = 0;
  while (!env.done()) {
    env.step(r.at(k++));
    ys.push_back(env.output());
  }
  return ys;
}

}  // namespace

TEST(HilDerivatives, ZeroIsAnEquilibrium) {
  AircraftParams p = AircraftParams::boeing747();
  p.w.setZero();
  const Vector d = hil_derivatives(Vector::Zero(6), {}, PilotParams{}, p, lqr_regression_fixture());
  EXPECT_EQ(d.norm(), 0.0);
}

TEST(HilDerivatives, TabulatedUncertaintyAtRest) {
  const AircraftParams p = AircraftParams::boeing747();
  const Vector d = hil_derivatives(Vector::Zero(6), {}, PilotParams{}, p, lqr_regression_fixture());
  for (Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(d(i), p.b(i) * 0.1);
  EXPECT_EQ(d(4), 0.0);
  EXPECT_EQ(d(5), 0.0);
}

TEST(HilDerivatives, ZeroUncertaintyIsThePureLinearModel) {
  AircraftParams p = AircraftParams::boeing747();
  p.w.setZero();
  const LqrGains g = lqr_regression_fixture();
  Vector s(6);
  s << 0.3, -1.2, 0.7, 4.0, 0.5, -2.0;
  HilDelayedInputs in;
  in.theta = 1.5;
  in.x_ctrl = s.head<4>();
  in.xc_ctrl = s(5);
  const Vector d = hil_derivatives(s, in, PilotParams{}, p, g);
  const double u = -g.k1.dot(in.x_ctrl) - g.k2 * in.xc_ctrl;
  const Vector expected = p.a * s.head(4) + p.b * u;
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(d(i), expected(i));
  EXPECT_EQ(d(4), -0.2 * 0.5 + 1.5);
  EXPECT_EQ(d(5), 4.0 - (0.08 * 0.5 + 0.1 * 1.5));
}

TEST(HilEnv, NominalLoopIsAsymptoticallyStable) {
  HilConfig cfg = linear_config();
  cfg.timing.horizon_steps = 20000;
  HilEnv env(cfg);
  env.set_evaluation_pitch(5.0);
  env.reset(Schedule::constant(0.0), 0, ResetMode::kEvaluation);
  const double initial = env.state().norm();
  while (!env.done()) env.step(5.0 * 0.0);
  EXPECT_LT(env.state().norm(), 1e-3 * initial);
}

TEST(HilEnv, IntegralActionTracksThePilotCommand) {
  const CheckResult r = check_hil_inner_loop(AircraftParams::boeing747(), PilotParams{}, std::nullopt);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(HilEnv, PitchSettlesAtPilotDcGain) {
  // Pilot steady state: xi = -b_h/a_h theta, c = (c_h * -b_h/a_h + d_h) theta
  // = 0.5 theta, and the integrator forces x4 = c, so x4 = r/3.
  HilConfig cfg = linear_config();
  cfg.timing.horizon_steps = 20000;
  const auto ys = run_outputs(cfg, Schedule::constant(5.0));
  EXPECT_NEAR(ys.back(), 5.0 / 3.0, 1e-6);
}

TEST(HilEnv, PilotDelayShiftsPerceivedError) {
  HilConfig cfg = linear_config();
  cfg.timing.horizon_steps = 40;
  const auto perceived = [&](std::size_t change_step) {
    HilEnv env(cfg);
    env.reset(Schedule::constant(0.0), 0, ResetMode::kEvaluation);
    std::vector<double> out;
    for (std::size_t k = 0; k < 40; ++k) {
      env.step(k >= change_step ? 5.0 : 0.0);
      out.push_back(env.perceived_error());
    }
    return out;
  };
  const auto a = perceived(5);
  const auto b = perceived(6);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) EXPECT_EQ(b[k + 1], a[k]) << "step " << k;
  // The new reference starts at t = 0.5 s and is perceived 0.5 s later.
  EXPECT_EQ(a[8], 0.0);   // state at t = 0.9 s
  EXPECT_EQ(a[9], 5.0);   // state at t = 1.0 s
}

TEST(HilEnv, ScenarioFlagOnlyTouchesControllerDelays) {
  HilConfig a;
  a.timing.horizon_steps = 300;
  HilConfig b = a;
  b.controller_state_delay = 1.0;
  b.controller_integral_delay = 0.2;
  const Schedule r = Schedule::parse("0:10, 100:-5");
  EXPECT_EQ(run_outputs(a, r), run_outputs(b, r));  // nominal ignores the delays
  a.scenario = HilScenario::kDelayed;
  b.scenario = HilScenario::kDelayed;
  EXPECT_NE(run_outputs(a, r), run_outputs(b, r));
}

TEST(HilEnv, SubstepRefinementConverges) {
  for (HilScenario scenario : {HilScenario::kNominal, HilScenario::kDelayed}) {
    HilConfig coarse;
    coarse.scenario = scenario;
    coarse.timing.horizon_steps = 300;
    HilConfig fine = coarse;
    fine.timing.sim_substep = 0.005;
    const Schedule r = Schedule::parse("0:12, 100:-8, 200:4");
    const auto yc = run_outputs(coarse, r, 2.0);
    const auto yf = run_outputs(fine, r, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < yc.size(); ++i) worst = std::max(worst, std::abs(yc[i] - yf[i]));
    EXPECT_LT(worst, 1e-4) << "scenario " << static_cast<int>(scenario);
  }
}

TEST(HilEnv, TabulatedUncertaintyDestabilizesTheLoop) {
  HilConfig cfg;
  cfg.aircraft.w = AircraftParams::boeing747().w;
  cfg.timing.horizon_steps = 900;
  cfg.action_low = -1e9;
  cfg.action_high = 1e9;
  HilEnv env(cfg);
  env.reset(Schedule::constant(5.0), 0, ResetMode::kEvaluation);
  double peak = 0.0;
  try {
    while (!env.done()) {
      env.step(5.0);
      peak = std::max(peak, std::abs(env.output()));
    }
  } catch (const SimulationFault&) {
    peak = INFINITY;
  }
  EXPECT_GT(peak, 1e3);
}

TEST(HilEnv, TrainingResetRandomizesPitchOnly) {
  HilEnv env(HilConfig{});
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    env.reset_training(rng);
    const Vector s = env.state();
    EXPECT_GE(s(3), -5.0);
    EXPECT_LE(s(3), 5.0);
    EXPECT_EQ(s(0), 0.0);
    EXPECT_EQ(s(4), 0.0);
    EXPECT_EQ(s(5), 0.0);
    EXPECT_GE(env.current_goal(), -15.0);
    EXPECT_LE(env.current_goal(), 15.0);
  }
}

TEST(HilEnv, ImportedGainsAreUsed) {
  HilConfig cfg;
  cfg.gains = LqrGains{Vector::Constant(4, 0.1), -0.2};
  HilEnv env(cfg);
  EXPECT_EQ(env.gains().k1, Vector::Constant(4, 0.1));
  EXPECT_EQ(env.gains().k2, -0.2);
}

TEST(HilEnv, InvalidConfigurations) {
  HilConfig c;
  c.pilot.delay = 0.505;
  EXPECT_THROW(HilEnv{c}, ConfigError);
  c = HilConfig{};
  c.pilot.delay = -1.0;
  EXPECT_THROW(HilEnv{c}, ConfigError);
  c = HilConfig{};
  c.goal_high = 100.0;
  EXPECT_THROW(HilEnv{c}, ConfigError);
  c = HilConfig{};
  c.aircraft.r = 0.0;
  EXPECT_THROW(HilEnv{c}, ConfigError);
}
