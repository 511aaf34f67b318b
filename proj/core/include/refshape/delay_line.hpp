#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "refshape/errors.hpp"

namespace refshape {

// Fixed-capacity history of samples taken once per simulation substep.
// read(d) returns the value pushed exactly d pushes ago; before enough pushes
// have happened it returns the initial fill value.
template <typename T>
class DelayLine {
 public:
  DelayLine(std::size_t max_delay, T fill)
      : ring_(max_delay + 1, fill), fill_(std::move(fill)) {}

  void reset(T fill) {
    fill_ = std::move(fill);
    std::fill(ring_.begin(), ring_.end(), fill_);
    pushes_ = 0;
    head_ = 0;
  }

  void push(T value) {
    head_ = (head_ + 1) % ring_.size();
    ring_[head_] = std::move(value);
    ++pushes_;
  }

  const T& read(std::size_t delay) const {
    if (delay > max_delay()) {
      throw ConfigError("delay line: delay " + std::to_string(delay) + " exceeds capacity " +
                        std::to_string(max_delay()));
    }
    if (delay >= pushes_) return fill_;
    return ring_[(head_ + ring_.size() - delay) % ring_.size()];
  }

  std::size_t max_delay() const { return ring_.size() - 1; }
  std::size_t pushes() const { return pushes_; }

 private:
  std::vector<T> ring_;
  T fill_;
  std::size_t head_ = 0;
  std::size_t pushes_ = 0;
};

}  // namespace refshape
