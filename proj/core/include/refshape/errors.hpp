#pragma once

#include <stdexcept>
#include <string>

namespace refshape {

// Operand shapes disagree (matrix product, network input, checkpoint vs. config).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An API was used out of order: stale forward cache, step after episode end, ...
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid or inconsistent configuration. `line` is 0 when not tied to a file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A simulation produced non-finite values.
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LQR Riccati integration failed to reach steady state.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace refshape
