// Acceptance gate: one PASS/FAIL line per criterion. Training outcomes are
// medians over seeds; trained checkpoints are cached by config hash.
#include <CLI11.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "refshape/config.hpp"
#include "refshape/errors.hpp"
#include "refshape/harness.hpp"
#include "refshape/verification.hpp"

using namespace refshape;
namespace fs = std::filesystem;

namespace {

struct Line {
  std::string id;
  bool passed;
  std::string name;
  std::string detail;
};

std::vector<Line> g_lines;

void report(std::string id, bool passed, std::string name, std::string detail) {
  std::cout << "criterion " << id << "  " << (passed ? "PASS" : "FAIL") << "  " << name << "  ("
            << detail << ")" << std::endl;
  g_lines.push_back({std::move(id), passed, std::move(name), std::move(detail)});
}

void report(std::string id, const CheckResult& r) {
  report(std::move(id), r.passed, r.name, r.detail);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string join(const std::vector<double>& v, const char* f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
  return "[" + s + "]";
}

double median(std::vector<double> v) {
  if (v.empty()) throw ContractError("median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Bump when training numerics change so stale checkpoints are not reused.
const std::string kCacheSalt = "numerics-2\n";

struct Trained {
  Agent agent;
  LearningCurve curve;
};

std::vector<double> read_rewards(const fs::path& p) {
  std::ifstream in(p);
  std::vector<double> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(std::stod(line));
  }
  return out;
}

Trained train_or_load(const RunConfig& cfg, const fs::path& cache) {
  char key[17];
  std::snprintf(key, sizeof key, "%016" PRIx64, fnv1a(kCacheSalt + cfg.to_ini()));
  const fs::path dir = cache / (std::string(to_string(cfg.env)) + "-s" +
                                std::to_string(cfg.seed) + "-" + key);
  const fs::path done = dir / "complete";
  if (!fs::exists(done)) {
    std::cerr << "training " << to_string(cfg.env) << " seed " << cfg.seed << " into "
              << dir.string() << std::endl;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "manifest.ini") << cfg.to_ini();
    auto env = cfg.make_env(cfg.train.steps_per_episode);
    Agent agent(kObservationDim, 1, cfg.agent_hyper(), cfg.seed);
    TrainConfig tc = cfg.train_config();
    tc.checkpoint_dir = dir;
    const std::size_t every = std::max<std::size_t>(1, tc.episodes / 10);
    const TrainResult r = train(*env, agent, tc, [&](std::size_t ep, double, double avg) {
      if (ep % every == 0) {
        std::cerr << "  episode " << ep << "/" << tc.episodes << " rolling " << avg << std::endl;
      }
    });
    {
      std::ofstream out(dir / "rewards.txt");
      out.precision(17);
      for (double x : r.curve.rewards()) out << x << "\n";
    }
    std::ofstream(done) << "ok\n";
  }
  Trained t{load_checkpoint(dir / "best.ckpt"), LearningCurve(cfg.train.curve_window)};
  for (double x : read_rewards(dir / "rewards.txt")) t.curve.push(x);
  if (t.curve.size() != cfg.train.episodes) {
    throw ContractError("cached curve in " + dir.string() + " has the wrong length");
  }
  return t;
}

double improvement(const RunConfig& cfg, const Agent& agent, EvalReport* out = nullptr) {
  auto env = cfg.make_env(cfg.eval_steps);
  EvalReport r = evaluate(*env, agent, cfg.eval_schedule, cfg.eval_seed);
  const EvalReport base = baseline_evaluate(*env, cfg.eval_schedule, cfg.eval_seed);
  attach_baseline(r, base);
  if (out) *out = r;
  return r.improvement_vs_baseline.value_or(0.0);
}

double baseline_mae(const RunConfig& cfg) {
  auto env = cfg.make_env(cfg.eval_steps);
  return baseline_evaluate(*env, cfg.eval_schedule, cfg.eval_seed).mae;
}

// Curve shape: late window mean minus early window mean of the rolling average.
double curve_gain(const LearningCurve& c, std::size_t late_from) {
  return c.mean_rolling(late_from - 1, c.size()) - c.mean_rolling(0, 100);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) seeds.push_back(std::stoull(tok));
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

void property_suite() {
  const VerifyOptions o;
  report("1", check_gradients(o.seed));
  report("2", check_adam());
  report("3", check_care(o.aircraft, o.gains));
  report("4", check_rk4_order());
  report("5", check_euler_maruyama(o.seed));
  report("6", check_ou_variance(o.seed));
  report("7", check_reward_table());
  report("8", check_replay(o.seed));
  // The literal reading cannot hold for this inner loop; its steady state is
  // set by the pilot gain. Reported as-is next to the tracking check that
  // does hold.
  report("9a", check_hil_literal_tracking(o.aircraft, o.pilot, o.gains));
  report("9b", check_hil_inner_loop(o.aircraft, o.pilot, o.gains));
  report("9c", check_heater_convergence(o.heaters));
  report("10", check_determinism(o.seed));
}

void hil_outcomes(const std::vector<std::uint64_t>& seeds, const fs::path& cache) {
  std::vector<double> nominal, delayed, within, gains;
  RunConfig base = RunConfig::defaults(EnvKind::kHil);
  RunConfig delayed_cfg = base;
  delayed_cfg.hil.scenario = HilScenario::kDelayed;
  for (std::uint64_t seed : seeds) {
    RunConfig cfg = base;
    cfg.seed = seed;
    const Trained t = train_or_load(cfg, cache);
    EvalReport r;
    nominal.push_back(improvement(cfg, t.agent, &r));
    within.push_back(r.fraction_within_amplitude(18.0 * 1.1));
    delayed.push_back(improvement(delayed_cfg, t.agent));
    gains.push_back(curve_gain(t.curve, 500));
  }
  report("11", median(nominal) >= 0.40, "hil nominal improvement >= 40% (median)",
         "per seed " + join(nominal, "%.3f") + "; baseline MAE " + fmt("%.3f", baseline_mae(base)));
  report("12", median(delayed) >= 0.30, "hil delayed transfer improvement >= 30% (median)",
         "per seed " + join(delayed, "%.3f") + "; baseline MAE " +
             fmt("%.3f", baseline_mae(delayed_cfg)));
  report("13", median(within) >= 0.95, "hil |y| <= 19.8 on >= 95% of steps (median)",
         "per seed " + join(within, "%.4f"));
  report("17a", median(gains) > 0.0,
         "hil rolling reward, episodes 500-1000 above episodes 1-100 (median)",
         "late minus early per seed " + join(gains, "%.2f"));
}

void heater_outcomes(const std::vector<std::uint64_t>& seeds, const fs::path& cache) {
  std::vector<double> small, large, comfort, gains;
  RunConfig base = RunConfig::defaults(EnvKind::kHeaters);
  RunConfig large_cfg = base;
  large_cfg.heaters.population = 1000;
  for (std::uint64_t seed : seeds) {
    RunConfig cfg = base;
    cfg.seed = seed;
    const Trained t = train_or_load(cfg, cache);
    small.push_back(improvement(cfg, t.agent));
    EvalReport r;
    large.push_back(improvement(large_cfg, t.agent, &r));
    comfort.push_back(r.fraction_within_rate(base.heaters.comfort_limit));
    gains.push_back(curve_gain(t.curve, 1000));
  }
  report("14", median(small) >= 0.60, "heaters N=4 improvement >= 60% (median)",
         "per seed " + join(small, "%.3f") + "; baseline MAE " + fmt("%.3f", baseline_mae(base)));
  report("15", median(large) >= 0.60, "heaters N=1000 transfer improvement >= 60% (median)",
         "per seed " + join(large, "%.3f") + "; baseline MAE " +
             fmt("%.3f", baseline_mae(large_cfg)));
  report("16", median(comfort) >= 0.90,
         "heaters mean-field |dy| <= 1 degC/h on >= 90% of steps, N=1000 (median)",
         "per seed " + join(comfort, "%.4f"));
  report("17b", median(gains) > 0.0,
         "heaters rolling reward, episodes 1000-2000 above episodes 1-100 (median)",
         "late minus early per seed " + join(gains, "%.2f"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance gate"};
  std::string cache = "acceptance-cache";
  std::string seeds_text = "1,2,3";
  bool properties_only = false;
  app.add_option("--cache-dir", cache, "where trained checkpoints are kept");
  app.add_option("--seeds", seeds_text, "comma-separated training seeds");
  app.add_flag("--properties-only", properties_only, "skip the training outcomes");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto seeds = parse_seeds(seeds_text);
    property_suite();
    if (!properties_only) {
      hil_outcomes(seeds, cache);
      heater_outcomes(seeds, cache);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::size_t failed = 0;
  for (const Line& l : g_lines) failed += l.passed ? 0 : 1;
  std::cout << g_lines.size() - failed << "/" << g_lines.size() << " criteria lines passed"
            << std::endl;
  for (const Line& l : g_lines) {
    if (!l.passed) std::cout << "failed: criterion " << l.id << "  " << l.name << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
