#include <gtest/gtest.h>

#include <cmath>

#include "refshape/errors.hpp"
#include "refshape/hil.hpp"
#include "refshape/lqr.hpp"
#include "refshape/verification.hpp"

using namespace refshape;

TEST(Lqr, ScalarClosedForm) {
  const Matrix one = Matrix::Ones(1, 1);
  const LqrSolution s = solve_lqr(-one, one, one, one);
  EXPECT_NEAR(s.p(0, 0), std::sqrt(2.0) - 1.0, 1e-8);
  EXPECT_NEAR(s.k(0, 0), std::sqrt(2.0) - 1.0, 1e-8);
  EXPECT_LT(care_residual(-one, one, one, one, s.p), 1e-8);
}

TEST(Lqr, TableSystemMatchesFixture) {
  const CheckResult r = check_care(AircraftParams::boeing747(), std::nullopt);
  EXPECT_TRUE(r.passed) << r.detail;
  const LqrGains g = design_lqr(AircraftParams::boeing747());
  const LqrGains fx = lqr_regression_fixture();
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(g.k1(i), fx.k1(i), 1e-6);
  EXPECT_NEAR(g.k2, fx.k2, 1e-6);
}

TEST(Lqr, ClosedLoopEigenvaluesAreStable) {
  const AircraftParams p = AircraftParams::boeing747();
  const LqrGains g = design_lqr(p);
  Matrix k(1, 5);
  k << g.k1.transpose(), g.k2;
  const Matrix closed = hil_augmented_a(p) - hil_augmented_b(p) * k;
  EXPECT_NEAR(spectral_abscissa(closed), -0.0117, 5e-4);
  EXPECT_TRUE(lyapunov_stable(closed));
  EXPECT_FALSE(lyapunov_stable(hil_augmented_a(p)));  // open loop has a pure integrator
}

TEST(Lqr, HeavierInputWeightWeakensGain) {
  AircraftParams p = AircraftParams::boeing747();
  const LqrGains g10 = design_lqr(p);
  p.r = 20.0;
  const LqrGains g20 = design_lqr(p);
  const auto norm = [](const LqrGains& g) {
    return std::sqrt(g.k1.squaredNorm() + g.k2 * g.k2);
  };
  EXPECT_LT(norm(g20), norm(g10));
}

TEST(Lqr, CorruptedGainsFailTheResidualCheck) {
  LqrGains bad = lqr_regression_fixture();
  bad.k1(2) *= 1.05;
  const CheckResult r = check_care(AircraftParams::boeing747(), bad);
  EXPECT_FALSE(r.passed) << r.detail;
  // Exact gains pass the same check.
  EXPECT_TRUE(check_care(AircraftParams::boeing747(), lqr_regression_fixture()).passed);
}

TEST(Lqr, LyapunovSolveResidual) {
  const Matrix a = from_rows(2, 2, {-1.0, 2.0, 0.0, -3.0});
  const Matrix q = Matrix::Identity(2, 2);
  const Matrix x = lyapunov_solve(a, q);
  EXPECT_LT((a.transpose() * x + x * a + q).norm(), 1e-12);
}

TEST(Lqr, NonConvergenceIsADesignError) {
  // Unstabilizable: unstable mode with no input authority.
  const Matrix a = Matrix::Ones(1, 1);
  const Matrix b = Matrix::Zero(1, 1);
  RiccatiOptions o;
  o.max_steps = 1000;
  EXPECT_THROW(solve_lqr(a, b, Matrix::Ones(1, 1), Matrix::Ones(1, 1), o), DesignError);
}
