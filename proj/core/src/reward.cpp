#include "refshape/reward.hpp"

#include <algorithm>
#include <cmath>

#include "refshape/errors.hpp"

namespace refshape {

void RewardSpec::validate() const {
  if (alpha_g < 0 || beta_h < 0 || beta_b < 0 || delta_b < 0 || bound_l < 0) {
    throw ConfigError("reward: parameters must be >= 0");
  }
  if (!(rho_h > 0) || !(rho_b > 0)) throw ConfigError("reward: rho_h and rho_b must be > 0");
}

RewardSpec hil_reward_spec() {
  return {.alpha_g = 0.3,
          .beta_h = 0.1,
          .rho_h = 3.5,
          .beta_b = 0.1,
          .rho_b = 3.5,
          .delta_b = 1.0,
          .bound_l = 18.0,
          .b_variant = BoundVariant::kAmplitude};
}

RewardSpec heater_reward_spec() {
  return {.alpha_g = 0.3,
          .beta_h = 0.1,
          .rho_h = 1.0,
          .beta_b = 0.1,
          .rho_b = 1.0,
          .delta_b = 1.0,
          .bound_l = 1.0,
          .b_variant = BoundVariant::kRate};
}

double g_term(const RewardSpec& spec, double abs_error) { return -spec.alpha_g * abs_error; }

double h_term(const RewardSpec& spec, double r_shaped, double r_shaped_prev) {
  const double delta = std::abs(r_shaped - r_shaped_prev);
  return delta >= spec.rho_h ? -spec.beta_h * delta : 0.0;
}

double b_term(const RewardSpec& spec, double y, double y_prev) {
  const double delta = std::abs(y - y_prev);
  const double bounded = spec.b_variant == BoundVariant::kAmplitude ? std::abs(y) : delta;
  double out = -spec.delta_b * std::max(0.0, bounded - spec.bound_l);
  if (delta >= spec.rho_b) out -= spec.beta_b * delta;
  return out;
}

RewardTerms reward_terms(const RewardSpec& spec, double r_goal, double y, double y_prev,
                         double r_shaped, double r_shaped_prev) {
  return {g_term(spec, std::abs(r_goal - y)), h_term(spec, r_shaped, r_shaped_prev),
          b_term(spec, y, y_prev)};
}

double reward(const RewardSpec& spec, double r_goal, double y, double y_prev, double r_shaped,
              double r_shaped_prev) {
  return reward_terms(spec, r_goal, y, y_prev, r_shaped, r_shaped_prev).total();
}

}  // namespace refshape
