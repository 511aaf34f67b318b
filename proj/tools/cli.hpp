#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "refshape/config.hpp"

namespace refshape::cli {

// Flags shared by every subcommand; unset values leave the config untouched.
struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> scenario;
  std::optional<std::string> env;
  std::optional<Index> population;
  std::optional<std::size_t> episodes;
  std::optional<std::size_t> steps;
};

// Loads the config file (or the defaults of --env), then applies overrides.
RunConfig resolve_config(const Overrides& o);

// Output directory: --out, else $REFSHAPE_OUTPUT_ROOT or the config's
// output_dir, joined with "<env>-<command>-s<seed>".
std::filesystem::path output_dir(const RunConfig& config, const Overrides& o,
                                 const std::string& command);

int cmd_train(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_eval(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
             bool identity, const std::filesystem::path& out, std::ostream& log);
int cmd_baseline(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

int run(int argc, char** argv);

}  // namespace refshape::cli
