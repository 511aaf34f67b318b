#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "refshape/agent.hpp"
#include "refshape/harness.hpp"
#include "refshape/heaters.hpp"
#include "refshape/hil.hpp"

namespace refshape {

enum class EnvKind { kHil, kHeaters };

std::string_view to_string(EnvKind kind);
EnvKind parse_env_kind(std::string_view text);
std::string_view to_string(HilScenario scenario);
HilScenario parse_scenario(std::string_view text);

// Fully resolved run configuration. Text form (see docs/config.md):
//
//   # comment            ; also a comment
//   [section]
//   key = value
//
// Keys are unique per section; unknown sections or keys are errors. Lists are
// comma separated. Only the section of the selected environment is used, but
// both are always present in the resolved form.
struct RunConfig {
  EnvKind env = EnvKind::kHil;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "runs";

  TrainConfig train;  // seed and checkpoint_dir are filled at run time
  AgentHyper agent;   // action bounds follow the selected environment
  HilConfig hil;
  HeatersConfig heaters;

  Schedule eval_schedule;
  std::size_t eval_steps = 0;
  std::uint64_t eval_seed = 0;
  std::size_t snapshot_every = 0;  // heaters population snapshot cadence; 0 disables

  // Defaults for one environment: episode count, evaluation schedule and
  // reward constants differ between the two.
  static RunConfig defaults(EnvKind env);
  // Throws ConfigError carrying the offending line number.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  std::string to_ini() const;
  void validate() const;

  const RewardSpec& reward() const;
  AgentHyper agent_hyper() const;
  // Environment for the selected plant with the given episode horizon.
  std::unique_ptr<Environment> make_env(std::size_t horizon) const;
  TrainConfig train_config() const;
};

}  // namespace refshape
