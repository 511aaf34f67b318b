#pragma once

#include <random>

#include "refshape/linalg.hpp"

namespace refshape {

// Ornstein-Uhlenbeck exploration noise, mean zero:
//   current <- current - theta * current * dt + sigma * sqrt(dt) * N(0, I)
class OuNoise {
 public:
  OuNoise(Index dim, double theta, double sigma, double dt = 1.0);

  void reset() { current_.setZero(); }
  const Vector& step(std::mt19937_64& rng);
  const Vector& current() const { return current_; }
  void set_current(const Vector& v);

  double theta() const { return theta_; }
  double sigma() const { return sigma_; }
  double dt() const { return dt_; }

 private:
  double theta_;
  double sigma_;
  double dt_;
  Vector current_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace refshape
