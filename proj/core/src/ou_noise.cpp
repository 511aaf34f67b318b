#include "refshape/ou_noise.hpp"

#include <cmath>

#include "refshape/errors.hpp"

namespace refshape {

OuNoise::OuNoise(Index dim, double theta, double sigma, double dt)
    : theta_(theta), sigma_(sigma), dt_(dt), current_(Vector::Zero(dim)) {
  if (!(theta > 0.0)) throw ConfigError("ou noise: theta must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("ou noise: sigma must be >= 0");
  if (!(dt > 0.0)) throw ConfigError("ou noise: dt must be > 0");
  if (dim < 1) throw ConfigError("ou noise: dimension must be >= 1");
}

const Vector& OuNoise::step(std::mt19937_64& rng) {
  const double diffusion = sigma_ * std::sqrt(dt_);
  for (Index i = 0; i < current_.size(); ++i) {
    current_(i) += -theta_ * current_(i) * dt_ + diffusion * gauss_(rng);
  }
  return current_;
}

void OuNoise::set_current(const Vector& v) {
  if (v.size() != current_.size()) throw ShapeError("ou noise: dimension mismatch");
  current_ = v;
}

}  // namespace refshape
