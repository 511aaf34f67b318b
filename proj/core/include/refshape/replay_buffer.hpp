#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "refshape/linalg.hpp"

namespace refshape {

struct Transition {
  Vector state;
  Vector action;  // shaped reference, environment units
  double reward = 0.0;
  Vector next_state;
};

// Column-stacked minibatch.
struct Minibatch {
  Matrix states;       // obs_dim x n
  Matrix actions;      // act_dim x n
  Vector rewards;      // n
  Matrix next_states;  // obs_dim x n
  Index size() const { return rewards.size(); }
};

// Fixed-capacity FIFO ring: once full, each insertion overwrites the oldest record.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, Index state_dim, Index action_dim);

  void store(Transition t);

  // n records drawn uniformly with replacement; std::nullopt while fewer than
  // n records are stored (the caller skips the update).
  std::optional<Minibatch> sample(std::size_t n, std::mt19937_64& rng) const;

  // Indices into the ring used by sample(); exposed for statistical tests.
  std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return records_.empty(); }
  const Transition& at(std::size_t slot) const { return records_.at(slot); }
  // Records in insertion order, oldest first.
  std::vector<Transition> ordered() const;

 private:
  std::size_t capacity_;
  Index state_dim_;
  Index action_dim_;
  std::vector<Transition> records_;
  std::size_t cursor_ = 0;  // next slot to overwrite once full
};

}  // namespace refshape
