#include "refshape/environment.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "refshape/errors.hpp"

namespace refshape {

Vector ObservationScaler::normalize(const RawObservation& raw) const {
  Vector v(kObservationDim);
  v << (raw.y - offset) / scale, (raw.y_prev - offset) / scale, (raw.r_goal - offset) / scale,
      (raw.r_shaped_prev - offset) / scale, raw.abs_error / scale;
  return v;
}

RawObservation ObservationScaler::denormalize(const Vector& obs) const {
  if (obs.size() != kObservationDim) throw ShapeError("observation: wrong dimension");
  return {obs(0) * scale + offset, obs(1) * scale + offset, obs(2) * scale + offset,
          obs(3) * scale + offset, obs(4) * scale};
}

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty() || segments_.front().start_step != 0) {
    throw ConfigError("schedule: first segment must start at step 0");
  }
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].start_step <= segments_[i - 1].start_step) {
      throw ConfigError("schedule: segment starts must be strictly increasing");
    }
  }
  for (const auto& s : segments_) {
    if (!std::isfinite(s.value)) throw ConfigError("schedule: non-finite value");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Schedule Schedule::parse(std::string_view text) {
  std::vector<Segment> segs;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("schedule: expected start:value, got '" + std::string(item) + "'");
    }
    const auto start_s = trim(item.substr(0, colon));
    const auto value_s = trim(item.substr(colon + 1));
    Segment seg;
    auto r1 = std::from_chars(start_s.data(), start_s.data() + start_s.size(), seg.start_step);
    auto r2 = std::from_chars(value_s.data(), value_s.data() + value_s.size(), seg.value);
    if (r1.ec != std::errc{} || r1.ptr != start_s.data() + start_s.size() || r2.ec != std::errc{} ||
        r2.ptr != value_s.data() + value_s.size()) {
      throw ConfigError("schedule: cannot parse '" + std::string(item) + "'");
    }
    segs.push_back(seg);
  }
  return Schedule(std::move(segs));
}

std::string Schedule::to_string() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(segments_[i].start_step);
    out += ':';
    auto r = std::to_chars(buf, buf + sizeof buf, segments_[i].value);
    out.append(buf, r.ptr);
  }
  return out;
}

double Schedule::at(std::size_t step) const {
  double v = segments_.front().value;
  for (const auto& s : segments_) {
    if (s.start_step > step) break;
    v = s.value;
  }
  return v;
}

std::size_t EnvTiming::substeps_per_step() const {
  if (!(agent_period > 0.0) || !(sim_substep > 0.0)) {
    throw ConfigError("timing: agent_period and sim_substep must be > 0");
  }
  const double ratio = agent_period / sim_substep;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw ConfigError("timing: agent_period must be an integer multiple of sim_substep");
  }
  return static_cast<std::size_t>(rounded);
}

void EnvTiming::validate() const {
  (void)substeps_per_step();
  if (horizon_steps < 1) throw ConfigError("timing: horizon_steps must be >= 1");
}

std::size_t delay_in_substeps(double delay, double sim_substep, const char* what) {
  if (!(delay >= 0.0)) throw ConfigError(std::string(what) + ": delay must be >= 0");
  const double ratio = delay / sim_substep;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError(std::string(what) + ": delay must be a whole number of substeps");
  }
  return static_cast<std::size_t>(rounded);
}

Vector Environment::reset(const Schedule& goal, std::uint64_t seed, ResetMode mode) {
  timing().validate();
  goal_ = goal;
  step_ = 0;
  reset_plant(seed, mode);
  active_ = true;
  y_prev_ = plant_output();
  r_shaped_prev_ = goal_.at(0);
  return observation_scaler().normalize(raw_observation());
}

Vector Environment::reset_training(std::mt19937_64& rng) {
  const auto [lo, hi] = training_goal_range();
  std::uniform_real_distribution<double> goal(lo, hi);
  const double g = goal(rng);
  const std::uint64_t seed = rng();
  return reset(Schedule::constant(g), seed, ResetMode::kTraining);
}

double Environment::current_goal() const {
  const std::size_t horizon = timing().horizon_steps;
  return goal_.at(step_ < horizon ? step_ : horizon - 1);
}

RawObservation Environment::raw_observation() const {
  const double y = plant_output();
  const double r = current_goal();
  return {y, y_prev_, r, r_shaped_prev_, std::abs(r - y)};
}

StepResult Environment::step(double shaped_reference) {
  if (!active_) throw ContractError("environment: step() before reset()");
  if (done()) throw ContractError("environment: step() after the episode finished");
  const auto [lo, hi] = action_range();
  if (!(shaped_reference >= lo && shaped_reference <= hi)) {
    throw ContractError("environment: shaped reference outside the action range");
  }
  StepResult out;
  out.reward_inputs.r_goal = current_goal();
  out.reward_inputs.y_prev = plant_output();
  out.reward_inputs.r_shaped = shaped_reference;
  out.reward_inputs.r_shaped_prev = r_shaped_prev_;

  advance_plant(shaped_reference);
  ++step_;

  out.reward_inputs.y = plant_output();
  y_prev_ = out.reward_inputs.y_prev;
  r_shaped_prev_ = shaped_reference;
  out.observation = observation_scaler().normalize(raw_observation());
  out.done = done();
  return out;
}

}  // namespace refshape
