#include "refshape/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace refshape {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(const EvalReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << "step,time,r_goal,r_shaped,y\n";
  for (const EvalRow& r : report.rows) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.r_goal) << ','
        << format_double(r.r_shaped) << ',' << format_double(r.y) << '\n';
  }
  finish(out, path);
}

void write_curve_csv(const LearningCurve& curve, const std::filesystem::path& path) {
  auto out = open_for_write(path, std::ios::trunc);
  out << "episode,reward,rolling_average\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << i + 1 << ',' << format_double(curve.rewards()[i]) << ','
        << format_double(curve.rolling(i)) << '\n';
  }
  finish(out, path);
}

void append_snapshot_csv(std::size_t step, const PopulationState& state,
                         const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path);
  auto out = open_for_write(path, std::ios::app);
  if (fresh) out << "step,household,temperature\n";
  for (Index i = 0; i < state.n(); ++i) {
    out << step << ',' << i << ',' << format_double(state.x(i)) << '\n';
  }
  finish(out, path);
}

}  // namespace refshape
