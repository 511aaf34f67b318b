#include "refshape/replay_buffer.hpp"

#include "refshape/errors.hpp"

namespace refshape {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Index state_dim, Index action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw ConfigError("replay buffer: capacity must be >= 1");
}

void ReplayBuffer::store(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_) {
    throw ShapeError("replay buffer: transition has wrong dimensions");
  }
  if (records_.size() < capacity_) {
    records_.push_back(std::move(t));
    return;
  }
  records_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
  std::vector<std::size_t> idx(n);
  if (records_.empty()) return {};
  std::uniform_int_distribution<std::size_t> pick(0, records_.size() - 1);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::optional<Minibatch> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (n == 0 || records_.size() < n) return std::nullopt;
  const auto idx = sample_indices(n, rng);
  Minibatch b;
  const auto cols = static_cast<Index>(n);
  b.states.resize(state_dim_, cols);
  b.actions.resize(action_dim_, cols);
  b.rewards.resize(cols);
  b.next_states.resize(state_dim_, cols);
  for (Index c = 0; c < cols; ++c) {
    const Transition& t = records_[idx[static_cast<std::size_t>(c)]];
    b.states.col(c) = t.state;
    b.actions.col(c) = t.action;
    b.rewards(c) = t.reward;
    b.next_states.col(c) = t.next_state;
  }
  return b;
}

std::vector<Transition> ReplayBuffer::ordered() const {
  std::vector<Transition> out;
  out.reserve(records_.size());
  for (std::size_t k = 0; k < records_.size(); ++k) {
    out.push_back(records_[(cursor_ + k) % records_.size()]);
  }
  return out;
}

}  // namespace refshape
