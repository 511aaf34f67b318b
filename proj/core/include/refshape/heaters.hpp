#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "refshape/environment.hpp"

namespace refshape {

enum class FreeHeatVariant {
  kAsWritten,             // -(U_a / C_a)(x_out - x0)
  kEquilibriumCorrected,  // -U_a (x_out - x0), makes x0 an open-loop equilibrium
};

// Per-household thermal model and mean-field control constants. Time in hours.
struct HeaterParams {
  double c_a = 10.0;     // kWh/degC
  double u_a = 0.2;      // kW/degC
  double x_out = -5.0;   // degC
  double sigma = 0.25;
  double pi_a = 0.4;
  double r_ctl = 10.0;
  double phi = 0.001;
  double gamma_mass = 0.6;
  double eta = 0.25;  // carried for completeness; the control law does not use it
  double beta2 = 0.038;
  double lambda1 = -0.028;
  FreeHeatVariant u_free_variant = FreeHeatVariant::kAsWritten;

  // Throws ConfigError on invalid ranges or degenerate denominators.
  void validate() const;
  double s_infinity(double x_star) const;
  friend bool operator==(const HeaterParams&, const HeaterParams&) = default;
};

struct PopulationState {
  Vector x;   // temperatures
  Vector x0;  // initial temperatures
  double t = 0.0;

  Index n() const { return x.size(); }
};

double offset_term(const HeaterParams& p, double x0_i, double t, double x_star);
double heater_control(const HeaterParams& p, double x_i, double x0_i, double t, double x_star);
double free_heat(const HeaterParams& p, double x0_i);

// One standard-normal stream per household, keyed by (seed, household id), so
// results do not depend on evaluation order.
class HouseholdNoise {
 public:
  HouseholdNoise() = default;
  HouseholdNoise(std::uint64_t seed, Index n);
  Vector draw();
  Index size() const { return static_cast<Index>(engines_.size()); }

 private:
  std::vector<std::mt19937_64> engines_;
};

// Euler-Maruyama substep of every household with the full control law and
// x*_inf held at r_shaped. `normals` holds one N(0,1) draw per household.
PopulationState population_step(const PopulationState& state, const HeaterParams& p,
                                 double r_shaped, double dt, const Vector& normals);
PopulationState population_step(const PopulationState& state, const HeaterParams& p,
                                double r_shaped, double dt, HouseholdNoise& noise);

// Open-loop substep (u_i = 0), deterministic.
PopulationState population_step_open_loop(const PopulationState& state, const HeaterParams& p,
                                          double dt);

double mean_output(const PopulationState& state);

struct HeatersConfig {
  HeaterParams params;
  Index population = 4;
  EnvTiming timing{1.0, 0.1, 200};
  double action_low = 0.0;
  double action_high = 30.0;
  double init_temp_low = 5.0;
  double init_temp_high = 15.0;
  double goal_low = 15.0;
  double goal_high = 25.0;
  double observation_offset = 20.0;
  double observation_scale = 10.0;
  double comfort_limit = 1.0;  // degC per agent step
  RewardSpec reward = heater_reward_spec();

  void validate() const;
};

class HeatersEnv final : public Environment {
 public:
  explicit HeatersEnv(HeatersConfig config);

  std::string name() const override { return "heaters"; }
  std::pair<double, double> action_range() const override {
    return {config_.action_low, config_.action_high};
  }
  std::pair<double, double> training_goal_range() const override {
    return {config_.goal_low, config_.goal_high};
  }
  const RewardSpec& reward_spec() const override { return config_.reward; }
  const EnvTiming& timing() const override { return config_.timing; }
  ObservationScaler observation_scaler() const override {
    return {config_.observation_offset, config_.observation_scale};
  }
  ConstraintLimits constraint_limits() const override { return {{}, config_.comfort_limit}; }

  const HeatersConfig& config() const { return config_; }
  const PopulationState& population() const { return state_; }
  // Households whose own temperature moved more than the comfort limit, per agent step.
  const std::vector<Index>& violations_per_step() const { return violations_per_step_; }
  // Total comfort violations per household over the episode.
  const std::vector<std::size_t>& violations_per_household() const { return violations_per_household_; }

 protected:
  void reset_plant(std::uint64_t seed, ResetMode mode) override;
  void advance_plant(double shaped_reference) override;
  double plant_output() const override { return mean_output(state_); }

 private:
  HeatersConfig config_;
  PopulationState state_;
  HouseholdNoise noise_;
  std::size_t substeps_ = 0;
  std::vector<Index> violations_per_step_;
  std::vector<std::size_t> violations_per_household_;
};

}  // namespace refshape
