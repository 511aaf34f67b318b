#pragma once

#include <functional>
#include <random>

#include "refshape/linalg.hpp"

namespace refshape {

// dx/dt = f(t, x)
using Derivative = std::function<Vector(double t, const Vector& x)>;
// Drift of an autonomous SDE, a(x).
using Drift = std::function<Vector(const Vector& x)>;

// Classical fourth-order Runge-Kutta step. Throws SimulationFault on a
// non-finite stage derivative, ConfigError when dt <= 0.
Vector rk4_step(const Derivative& f, const Vector& x, double t, double dt);

// x + a(x) dt + sigma sqrt(dt) N(0, I), components independent.
Vector euler_maruyama_step(const Drift& drift, double diffusion_sigma, const Vector& x, double dt,
                           std::mt19937_64& rng);

// Scalar-noise variant: the caller supplies the standard-normal draws.
Vector euler_maruyama_step(const Drift& drift, double diffusion_sigma, const Vector& x, double dt,
                           const Vector& standard_normals);

}  // namespace refshape
