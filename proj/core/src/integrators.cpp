#include "refshape/integrators.hpp"

#include <cmath>

#include "refshape/errors.hpp"

namespace refshape {

namespace {

const Vector& checked(const Vector& d, const char* what) {
  if (!d.allFinite()) throw SimulationFault(std::string(what) + ": non-finite derivative");
  return d;
}

}  // namespace

Vector rk4_step(const Derivative& f, const Vector& x, double t, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be > 0");
  const double h = 0.5 * dt;
  const Vector k1 = f(t, x);
  checked(k1, "rk4_step");
  const Vector k2 = f(t + h, x + h * k1);
  checked(k2, "rk4_step");
  const Vector k3 = f(t + h, x + h * k2);
  checked(k3, "rk4_step");
  const Vector k4 = f(t + dt, x + dt * k3);
  checked(k4, "rk4_step");
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector euler_maruyama_step(const Drift& drift, double diffusion_sigma, const Vector& x, double dt,
                           const Vector& standard_normals) {
  if (!(dt > 0.0)) throw ConfigError("euler_maruyama_step: dt must be > 0");
  if (standard_normals.size() != x.size()) throw ShapeError("euler_maruyama_step: noise size");
  const Vector a = drift(x);
  checked(a, "euler_maruyama_step");
  return x + dt * a + (diffusion_sigma * std::sqrt(dt)) * standard_normals;
}

Vector euler_maruyama_step(const Drift& drift, double diffusion_sigma, const Vector& x, double dt,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(x.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
  return euler_maruyama_step(drift, diffusion_sigma, x, dt, z);
}

}  // namespace refshape
