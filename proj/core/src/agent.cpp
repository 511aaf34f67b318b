#include "refshape/agent.hpp"

#include <cmath>

#include "refshape/errors.hpp"
#include "refshape/rng.hpp"

namespace refshape {

void AgentHyper::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent: gamma must be in [0,1]");
  if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw ConfigError("agent: tau_soft must be in [0,1]");
  if (minibatch_size == 0) throw ConfigError("agent: minibatch_size must be >= 1");
  if (replay_capacity == 0) throw ConfigError("agent: replay_capacity must be >= 1");
  if (hidden_sizes.size() < 2) throw ConfigError("agent: need two hidden layers");
  actor_adam().validate();
  critic_adam().validate();
  if (action_low.size() == 0 || action_low.size() != action_high.size()) {
    throw ConfigError("agent: action bounds missing or mismatched");
  }
  if (!(action_low.array() < action_high.array()).all()) {
    throw ConfigError("agent: action_low must be < action_high componentwise");
  }
}

MlpSpec actor_spec(Index obs_dim, Index act_dim, const std::vector<Index>& hidden) {
  MlpSpec s;
  s.layer_sizes.push_back(obs_dim);
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.begin(), hidden.end());
  s.layer_sizes.push_back(act_dim);
  s.output_activation = OutputActivation::kTanh;
  s.validate();
  return s;
}

MlpSpec critic_spec(Index obs_dim, Index act_dim, const std::vector<Index>& hidden) {
  MlpSpec s;
  s.layer_sizes.push_back(obs_dim);
  s.layer_sizes.insert(s.layer_sizes.end(), hidden.begin(), hidden.end());
  s.layer_sizes.push_back(1);
  s.output_activation = OutputActivation::kIdentity;
  s.action_injection_layer = 1;
  s.action_size = act_dim;
  s.validate();
  return s;
}

ActionScaler::ActionScaler(Vector low, Vector high) : low_(std::move(low)), high_(std::move(high)) {}

Vector ActionScaler::to_env(const Vector& unit) const {
  return low_ + ((unit.array() + 1.0) * 0.5 * (high_ - low_).array()).matrix();
}

Vector ActionScaler::to_unit(const Vector& env) const {
  return (2.0 * (env - low_).array() / (high_ - low_).array() - 1.0).matrix();
}

Matrix ActionScaler::to_unit(const Matrix& env) const {
  Matrix out(env.rows(), env.cols());
  for (Index c = 0; c < env.cols(); ++c) out.col(c) = to_unit(Vector(env.col(c)));
  return out;
}

Vector ActionScaler::clamp(const Vector& env) const { return env.cwiseMax(low_).cwiseMin(high_); }

Agent::Agent(Index obs_dim, Index act_dim, AgentHyper hyper, std::uint64_t seed)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      hyper_(std::move(hyper)),
      buffer_(hyper_.replay_capacity, obs_dim, act_dim),
      noise_(act_dim, hyper_.ou_theta, hyper_.ou_sigma, hyper_.ou_dt),
      noise_rng_(seeded_stream(seed, 2)),
      sample_rng_(seeded_stream(seed, 3)) {
  hyper_.validate();
  if (hyper_.action_low.size() != act_dim) throw ShapeError("agent: action bounds dimension");
  scaler_ = ActionScaler(hyper_.action_low, hyper_.action_high);
  auto init_rng = seeded_stream(seed, 1);
  actor_.spec = actor_spec(obs_dim, act_dim, hyper_.hidden_sizes);
  critic_.spec = critic_spec(obs_dim, act_dim, hyper_.hidden_sizes);
  actor_.params = init_params(actor_.spec, init_rng);
  critic_.params = init_params(critic_.spec, init_rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
}

Vector Agent::policy(const Vector& observation) const {
  if (observation.size() != obs_dim_) throw ShapeError("agent: observation dimension");
  return scaler_.clamp(scaler_.to_env(mlp_predict(actor_.params, actor_.spec, observation)));
}

Vector Agent::act(const Vector& observation, bool explore) {
  if (observation.size() != obs_dim_) throw ShapeError("agent: observation dimension");
  Vector unit = mlp_predict(actor_.params, actor_.spec, observation);
  if (explore) unit += noise_.step(noise_rng_);
  return scaler_.clamp(scaler_.to_env(unit));
}

std::optional<Minibatch> Agent::sample_minibatch() {
  return buffer_.sample(hyper_.minibatch_size, sample_rng_);
}

Vector Agent::td_targets(const Minibatch& batch) const {
  const auto next_actions = mlp_forward(target_actor_.params, target_actor_.spec, batch.next_states);
  const auto next_q = mlp_forward(target_critic_.params, target_critic_.spec, batch.next_states,
                                  next_actions.output);
  // Episodes end by time limit only, so every transition bootstraps.
  return batch.rewards + hyper_.gamma * next_q.output.row(0).transpose();
}

Vector Agent::q_values(const Matrix& states, const Matrix& env_actions) const {
  const auto q = mlp_forward(critic_.params, critic_.spec, states, scaler_.to_unit(env_actions));
  return q.output.row(0).transpose();
}

double Agent::critic_update(const Minibatch& batch) {
  const Index n = batch.size();
  if (n == 0) throw ContractError("critic_update: empty batch");
  const Vector targets = td_targets(batch);
  const auto fwd =
      mlp_forward(critic_.params, critic_.spec, batch.states, scaler_.to_unit(batch.actions));
  const Vector residual = targets - fwd.output.row(0).transpose();
  const double loss = residual.squaredNorm() / static_cast<double>(n);
  // d/dQ_i of (1/N) sum (g_i - Q_i)^2
  const Matrix dq = (-2.0 / static_cast<double>(n)) * residual.transpose();
  const auto back = mlp_backward(critic_.params, critic_.spec, fwd.cache, dq);
  adam_update(critic_.params, back.param_grads, hyper_.critic_adam());
  return loss;
}

void Agent::actor_update(const Minibatch& batch) {
  const Index n = batch.size();
  if (n == 0) throw ContractError("actor_update: empty batch");
  const auto actor_fwd = mlp_forward(actor_.params, actor_.spec, batch.states);
  const auto critic_fwd =
      mlp_forward(critic_.params, critic_.spec, batch.states, actor_fwd.output);
  // Descend on -(1/N) sum Q(s_i, mu(s_i)).
  const Matrix dq = Matrix::Constant(1, n, -1.0 / static_cast<double>(n));
  const auto critic_back =
      mlp_backward(critic_.params, critic_.spec, critic_fwd.cache, dq, GradScope::kInputsOnly);
  const auto actor_back =
      mlp_backward(actor_.params, actor_.spec, actor_fwd.cache, *critic_back.action_grad);
  adam_update(actor_.params, actor_back.param_grads, hyper_.actor_adam());
}

void Agent::soft_update() {
  refshape::soft_update(target_actor_.params, actor_.params, hyper_.tau_soft);
  refshape::soft_update(target_critic_.params, critic_.params, hyper_.tau_soft);
}

std::optional<double> Agent::train_step() {
  auto batch = sample_minibatch();
  if (!batch) return std::nullopt;
  const double loss = critic_update(*batch);
  actor_update(*batch);
  soft_update();
  return loss;
}

}  // namespace refshape
