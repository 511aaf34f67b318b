#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "refshape/adam.hpp"
#include "refshape/mlp.hpp"
#include "refshape/ou_noise.hpp"
#include "refshape/replay_buffer.hpp"

namespace refshape {

struct AgentHyper {
  double gamma = 0.99;
  double tau_soft = 1e-3;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::size_t minibatch_size = 64;
  std::size_t replay_capacity = 1'000'000;
  std::vector<Index> hidden_sizes{400, 300};
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_dt = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  Vector action_low;
  Vector action_high;

  void validate() const;
  AdamHyper actor_adam() const { return {actor_lr, adam_beta1, adam_beta2, adam_epsilon}; }
  AdamHyper critic_adam() const { return {critic_lr, adam_beta1, adam_beta2, adam_epsilon}; }
};

struct Network {
  MlpSpec spec;
  MlpParams params;
};

MlpSpec actor_spec(Index obs_dim, Index act_dim, const std::vector<Index>& hidden);
MlpSpec critic_spec(Index obs_dim, Index act_dim, const std::vector<Index>& hidden);

// Maps actor outputs in (-1, 1) affinely onto [low, high] and back.
class ActionScaler {
 public:
  ActionScaler() = default;
  ActionScaler(Vector low, Vector high);
  Vector to_env(const Vector& unit) const;
  Vector to_unit(const Vector& env) const;
  Matrix to_unit(const Matrix& env) const;
  Vector clamp(const Vector& env) const;
  const Vector& low() const { return low_; }
  const Vector& high() const { return high_; }

 private:
  Vector low_;
  Vector high_;
};

// Deterministic-policy actor-critic with target networks, replay and OU exploration.
//
// The critic sees actions in actor units, (-1, 1); transitions store actions in
// environment units and are mapped back when sampled. One Agent owns its RNG
// streams, so a run is reproducible from (seed, hyperparameters).
class Agent {
 public:
  Agent(Index obs_dim, Index act_dim, AgentHyper hyper, std::uint64_t seed);

  // Policy action in environment units; with explore, OU noise (scaled by the
  // half-width of the action range) is added before clamping to the bounds.
  Vector act(const Vector& observation, bool explore);

  // Deterministic action without touching the noise state.
  Vector policy(const Vector& observation) const;

  void begin_episode() { noise_.reset(); }
  void store(Transition t) { buffer_.store(std::move(t)); }
  std::optional<Minibatch> sample_minibatch();

  // One Adam descent step on the TD mean-squared error; returns the pre-step loss.
  double critic_update(const Minibatch& batch);
  // One Adam ascent step on mean Q(s, mu(s)).
  void actor_update(const Minibatch& batch);
  // Blends both target networks toward the live ones with tau_soft.
  void soft_update();

  // TD targets g_i = R_i + gamma * Q'(s_{i+1}, mu'(s_{i+1})).
  Vector td_targets(const Minibatch& batch) const;
  // Q(s, a) for environment-unit actions.
  Vector q_values(const Matrix& states, const Matrix& env_actions) const;

  // critic_update + actor_update + soft_update when the buffer is warm.
  // Returns the critic loss, or nullopt when no update ran.
  std::optional<double> train_step();

  const AgentHyper& hyper() const { return hyper_; }
  Index obs_dim() const { return obs_dim_; }
  Index act_dim() const { return act_dim_; }
  const ActionScaler& scaler() const { return scaler_; }

  Network& actor() { return actor_; }
  Network& critic() { return critic_; }
  Network& target_actor() { return target_actor_; }
  Network& target_critic() { return target_critic_; }
  const Network& actor() const { return actor_; }
  const Network& critic() const { return critic_; }
  const Network& target_actor() const { return target_actor_; }
  const Network& target_critic() const { return target_critic_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  OuNoise& noise() { return noise_; }
  std::mt19937_64& noise_rng() { return noise_rng_; }

 private:
  Index obs_dim_;
  Index act_dim_;
  AgentHyper hyper_;
  ActionScaler scaler_;
  Network actor_;
  Network critic_;
  Network target_actor_;
  Network target_critic_;
  ReplayBuffer buffer_;
  OuNoise noise_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 sample_rng_;
};

// Versioned binary checkpoint of all four networks (parameters and Adam state)
// plus hyperparameters. Replay contents and RNG state are not saved.
void save_checkpoint(const Agent& agent, const std::filesystem::path& path);
Agent load_checkpoint(const std::filesystem::path& path);

}  // namespace refshape
