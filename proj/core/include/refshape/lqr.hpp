#pragma once

#include <cstddef>

#include "refshape/linalg.hpp"

namespace refshape {

struct RiccatiOptions {
  double dt = 1e-3;
  double tolerance = 1e-9;  // stop when ||dP/dt||_F falls below this
  std::size_t max_steps = 20'000'000;
};

struct LqrSolution {
  Matrix p;  // stabilizing CARE solution
  Matrix k;  // R^{-1} B^T P, one row per input
  std::size_t steps = 0;
};

// Integrates dP/dt = A'P + PA - P B R^{-1} B' P + Q from P = 0 with RK4 until
// steady state. Throws DesignError if the iteration budget runs out.
LqrSolution solve_lqr(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                      const RiccatiOptions& options = {});

// Frobenius norm of A'P + PA - P B R^{-1} B' P + Q.
double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& p);

// Solves A'X + XA + Q = 0 through the Kronecker form (small systems only).
Matrix lyapunov_solve(const Matrix& a, const Matrix& q);

// Lyapunov stability test: A is Hurwitz iff A'X + XA = -I has a symmetric
// positive definite solution.
bool lyapunov_stable(const Matrix& a);

// Cost-to-go of a fixed gain K: solves (A-BK)'P + P(A-BK) + Q + K'RK = 0.
Matrix gain_cost_matrix(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                        const Matrix& k);

// Largest real part among the eigenvalues of m.
double spectral_abscissa(const Matrix& m);

}  // namespace refshape
