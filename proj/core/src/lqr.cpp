#include "refshape/lqr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <string>

#include "refshape/errors.hpp"

namespace refshape {

namespace {

class RiccatiFlow {
 public:
  RiccatiFlow(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r)
      : a_(a), q_(q), s_(b * r.inverse() * b.transpose()) {}

  // out = A'P + PA - P S P + Q
  void eval(const Matrix& p, Matrix& out) {
    tmp_.noalias() = s_ * p;
    out.noalias() = a_.transpose() * p;
    out.noalias() += p * a_;
    out.noalias() -= p * tmp_;
    out += q_;
  }

 private:
  Matrix a_;
  Matrix q_;
  Matrix s_;
  Matrix tmp_;
};

}  // namespace

double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                     const Matrix& p) {
  const Matrix res = a.transpose() * p + p * a - p * b * r.inverse() * b.transpose() * p + q;
  return res.norm();
}

LqrSolution solve_lqr(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                      const RiccatiOptions& options) {
  const Index n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != b.cols() ||
      r.cols() != b.cols()) {
    throw ShapeError("solve_lqr: inconsistent A, B, Q, R shapes");
  }
  RiccatiFlow flow(a, b, q, r);
  const double h = options.dt;
  Matrix p = Matrix::Zero(n, n);
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), stage(n, n);
  for (std::size_t step = 0; step < options.max_steps; ++step) {
    flow.eval(p, k1);
    if (!k1.allFinite()) throw DesignError("solve_lqr: Riccati flow diverged");
    if (k1.norm() < options.tolerance) {
      p = 0.5 * (p + p.transpose());
      LqrSolution out;
      out.k = r.inverse() * b.transpose() * p;
      out.p = std::move(p);
      out.steps = step;
      return out;
    }
    stage = p + 0.5 * h * k1;
    flow.eval(stage, k2);
    stage = p + 0.5 * h * k2;
    flow.eval(stage, k3);
    stage = p + h * k3;
    flow.eval(stage, k4);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  throw DesignError("solve_lqr: no steady state within " + std::to_string(options.max_steps) +
                    " steps");
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.cols()) {
    throw ShapeError("lyapunov_solve: A and Q must be square and equally sized");
  }
  const Index n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  // vec(A'X + XA) = (I (x) A' + A' (x) I) vec(X), column-major vec.
  Matrix big = Matrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += eye(i, j) * a.transpose();
      big.block(i * n, j * n, n, n) += a(j, i) * eye;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(Matrix(q).data(), n * n);
  const Vector x = big.fullPivLu().solve(rhs);
  Matrix out = Eigen::Map<const Matrix>(x.data(), n, n);
  return 0.5 * (out + out.transpose());
}

bool lyapunov_stable(const Matrix& a) {
  const Matrix x = lyapunov_solve(a, Matrix::Identity(a.rows(), a.cols()));
  if (!x.allFinite()) return false;
  const Matrix residual = a.transpose() * x + x * a + Matrix::Identity(a.rows(), a.cols());
  if (residual.norm() > 1e-6 * (1.0 + x.norm())) return false;
  return Eigen::LLT<Matrix>(x).info() == Eigen::Success;
}

Matrix gain_cost_matrix(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                        const Matrix& k) {
  const Matrix closed = a - b * k;
  return lyapunov_solve(closed, q + k.transpose() * r * k);
}

double spectral_abscissa(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  return solver.eigenvalues().real().maxCoeff();
}

}  // namespace refshape
