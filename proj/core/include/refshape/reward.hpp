#pragma once

namespace refshape {

// Which quantity the B term bounds: the output itself (pitch angle) or its
// per-step change (temperature comfort).
enum class BoundVariant { kAmplitude, kRate };

// R = G(e) + H(r_shaped) + B(y).
struct RewardSpec {
  double alpha_g = 0.3;
  double beta_h = 0.1;
  double rho_h = 3.5;
  double beta_b = 0.1;
  double rho_b = 3.5;
  double delta_b = 1.0;
  double bound_l = 18.0;
  BoundVariant b_variant = BoundVariant::kAmplitude;

  void validate() const;
  friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

RewardSpec hil_reward_spec();
RewardSpec heater_reward_spec();

struct RewardTerms {
  double g = 0.0;
  double h = 0.0;
  double b = 0.0;
  double total() const { return g + h + b; }
};

// -alpha_g * e, with e the absolute tracking error.
double g_term(const RewardSpec& spec, double abs_error);

// Penalizes quick changes of the shaped reference: -beta_h * delta once delta >= rho_h.
double h_term(const RewardSpec& spec, double r_shaped, double r_shaped_prev);

// Output penalty. Amplitude variant: -delta_b * max(0, |y| - L); rate variant:
// -delta_b * max(0, |dy| - L). Both add -beta_b * |dy| once |dy| >= rho_b.
double b_term(const RewardSpec& spec, double y, double y_prev);

RewardTerms reward_terms(const RewardSpec& spec, double r_goal, double y, double y_prev,
                         double r_shaped, double r_shaped_prev);

double reward(const RewardSpec& spec, double r_goal, double y, double y_prev, double r_shaped,
              double r_shaped_prev);

}  // namespace refshape
