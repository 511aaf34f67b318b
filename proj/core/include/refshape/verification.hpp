#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refshape/heaters.hpp"
#include "refshape/hil.hpp"

namespace refshape {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  AircraftParams aircraft = AircraftParams::boeing747();
  PilotParams pilot;
  HeaterParams heaters;
  // Gains under test; designed from `aircraft` when empty.
  std::optional<LqrGains> gains;
  std::uint64_t seed = 20240611;
};

// Each check is self-contained and deterministic for a fixed seed.
CheckResult check_gradients(std::uint64_t seed);
CheckResult check_adam();
CheckResult check_care(const AircraftParams& aircraft, const std::optional<LqrGains>& gains);
CheckResult check_rk4_order();
CheckResult check_euler_maruyama(std::uint64_t seed);
CheckResult check_ou_variance(std::uint64_t seed);
CheckResult check_reward_table();
CheckResult check_replay(std::uint64_t seed);
// Pitch settles on the pilot command and on the linear steady state (W = 0).
CheckResult check_hil_inner_loop(const AircraftParams& aircraft, const PilotParams& pilot,
                                 const std::optional<LqrGains>& gains);
// |y - r~| < 1e-3 at steady state for W = 0, as a plain tracking statement.
CheckResult check_hil_literal_tracking(const AircraftParams& aircraft, const PilotParams& pilot,
                                       const std::optional<LqrGains>& gains);
CheckResult check_heater_convergence(const HeaterParams& params);
CheckResult check_determinism(std::uint64_t seed);

// The full property suite in a fixed order.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace refshape
