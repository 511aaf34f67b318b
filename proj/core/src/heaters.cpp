#include "refshape/heaters.hpp"

#include <cmath>

#include "refshape/errors.hpp"
#include "refshape/rng.hpp"

namespace refshape {

namespace {

double s_inf_denominator(const HeaterParams& p) {
  return -p.u_a / p.c_a - p.pi_a / (p.c_a * p.c_a * p.r_ctl) - p.phi;
}

constexpr std::uint64_t kInitialTemperatures = 11;
constexpr std::uint64_t kHouseholdNoise = 12;

}  // namespace

void HeaterParams::validate() const {
  if (!(c_a > 0.0)) throw ConfigError("heaters: c_a must be > 0");
  if (!(u_a > 0.0)) throw ConfigError("heaters: u_a must be > 0");
  if (!(r_ctl > 0.0)) throw ConfigError("heaters: r_ctl must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("heaters: sigma must be >= 0");
  if (!(lambda1 < 0.0)) throw ConfigError("heaters: lambda1 must be < 0");
  if (beta2 == lambda1) throw ConfigError("heaters: beta2 must differ from lambda1");
  if (s_inf_denominator(*this) == 0.0) throw ConfigError("heaters: s_inf denominator is zero");
  if (!std::isfinite(x_out) || !std::isfinite(pi_a) || !std::isfinite(phi) ||
      !std::isfinite(gamma_mass) || !std::isfinite(eta) || !std::isfinite(beta2)) {
    throw ConfigError("heaters: parameters must be finite");
  }
}

double HeaterParams::s_infinity(double x_star) const { return x_star / s_inf_denominator(*this); }

double offset_term(const HeaterParams& p, double x0_i, double t, double x_star) {
  return p.s_infinity(x_star) +
         p.gamma_mass / (p.beta2 - p.lambda1) * (x_star - x0_i) * std::exp(p.lambda1 * t);
}

double heater_control(const HeaterParams& p, double x_i, double x0_i, double t, double x_star) {
  return -(p.pi_a * x_i + offset_term(p, x0_i, t, x_star)) / (p.c_a * p.r_ctl);
}

double free_heat(const HeaterParams& p, double x0_i) {
  const double k = p.u_free_variant == FreeHeatVariant::kAsWritten ? p.u_a / p.c_a : p.u_a;
  return -k * (p.x_out - x0_i);
}

HouseholdNoise::HouseholdNoise(std::uint64_t seed, Index n) {
  engines_.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    engines_.push_back(seeded_stream(seed, kHouseholdNoise, static_cast<std::uint64_t>(i)));
  }
}

Vector HouseholdNoise::draw() {
  Vector z(size());
  for (Index i = 0; i < z.size(); ++i) {
    z(i) = std::normal_distribution<double>{}(engines_[static_cast<std::size_t>(i)]);
  }
  return z;
}

PopulationState population_step(const PopulationState& state, const HeaterParams& p,
                                 double r_shaped, double dt, const Vector& normals) {
  if (!(dt > 0.0)) throw ConfigError("population_step: dt must be > 0");
  if (normals.size() != state.n()) throw ShapeError("population_step: one draw per household");
  PopulationState next = state;
  const double noise_scale = p.sigma * std::sqrt(dt);
  for (Index i = 0; i < state.n(); ++i) {
    const double x = state.x(i);
    const double x0 = state.x0(i);
    const double u = heater_control(p, x, x0, state.t, r_shaped);
    const double drift = (-p.u_a * (x - p.x_out) + u + free_heat(p, x0)) / p.c_a;
    next.x(i) = x + drift * dt + noise_scale * normals(i);
  }
  next.t = state.t + dt;
  if (!next.x.allFinite()) throw SimulationFault("heaters: temperature became non-finite");
  return next;
}

PopulationState population_step(const PopulationState& state, const HeaterParams& p,
                                 double r_shaped, double dt, HouseholdNoise& noise) {
  if (p.sigma == 0.0) return population_step(state, p, r_shaped, dt, Vector::Zero(state.n()));
  return population_step(state, p, r_shaped, dt, noise.draw());
}

PopulationState population_step_open_loop(const PopulationState& state, const HeaterParams& p,
                                          double dt) {
  if (!(dt > 0.0)) throw ConfigError("population_step: dt must be > 0");
  PopulationState next = state;
  for (Index i = 0; i < state.n(); ++i) {
    const double drift = (-p.u_a * (state.x(i) - p.x_out) + free_heat(p, state.x0(i))) / p.c_a;
    next.x(i) = state.x(i) + drift * dt;
  }
  next.t = state.t + dt;
  return next;
}

double mean_output(const PopulationState& state) {
  if (state.n() < 1) throw ContractError("mean_output: empty population");
  return state.x.mean();
}

void HeatersConfig::validate() const {
  params.validate();
  timing.validate();
  if (population < 1) throw ConfigError("heaters: population must be >= 1");
  if (!(action_low < action_high)) throw ConfigError("heaters: action_low must be < action_high");
  if (!(init_temp_low <= init_temp_high)) throw ConfigError("heaters: initial temperature range");
  if (!(goal_low <= goal_high)) throw ConfigError("heaters: goal_low must be <= goal_high");
  if (goal_low < action_low || goal_high > action_high) {
    throw ConfigError("heaters: goal range must lie inside the action range");
  }
  if (!(observation_scale > 0.0)) throw ConfigError("heaters: observation_scale must be > 0");
  if (!(comfort_limit > 0.0)) throw ConfigError("heaters: comfort_limit must be > 0");
  reward.validate();
}

HeatersEnv::HeatersEnv(HeatersConfig config) : config_(std::move(config)) {
  config_.validate();
  substeps_ = config_.timing.substeps_per_step();
}

void HeatersEnv::reset_plant(std::uint64_t seed, ResetMode /*mode*/) {
  // Households always start from a spread of cold temperatures; the seed picks them.
  auto rng = seeded_stream(seed, kInitialTemperatures);
  std::uniform_real_distribution<double> dist(config_.init_temp_low, config_.init_temp_high);
  const Index n = config_.population;
  state_.x0.resize(n);
  for (Index i = 0; i < n; ++i) state_.x0(i) = dist(rng);
  state_.x = state_.x0;
  state_.t = 0.0;
  noise_ = HouseholdNoise(seed, n);
  violations_per_step_.clear();
  violations_per_household_.assign(static_cast<std::size_t>(n), 0);
}

void HeatersEnv::advance_plant(double shaped_reference) {
  const Vector before = state_.x;
  const double dt = config_.timing.sim_substep;
  for (std::size_t k = 0; k < substeps_; ++k) {
    state_ = population_step(state_, config_.params, shaped_reference, dt, noise_);
  }
  Index count = 0;
  for (Index i = 0; i < state_.n(); ++i) {
    if (std::abs(state_.x(i) - before(i)) > config_.comfort_limit) {
      ++count;
      ++violations_per_household_[static_cast<std::size_t>(i)];
    }
  }
  violations_per_step_.push_back(count);
}

}  // namespace refshape
