#pragma once

#include <filesystem>

#include "refshape/harness.hpp"
#include "refshape/heaters.hpp"

namespace refshape {

// Column layouts (header row included, comma separated, C locale, shortest
// round-trip decimal formatting):
//   trajectory: step,time,r_goal,r_shaped,y
//   curve:      episode,reward,rolling_average
//   snapshot:   step,household,temperature
void write_trajectory_csv(const EvalReport& report, const std::filesystem::path& path);
void write_curve_csv(const LearningCurve& curve, const std::filesystem::path& path);

// Appends one population snapshot; writes the header when the file is new.
void append_snapshot_csv(std::size_t step, const PopulationState& state,
                         const std::filesystem::path& path);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace refshape
