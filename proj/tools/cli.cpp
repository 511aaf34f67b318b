#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "refshape/csv.hpp"
#include "refshape/errors.hpp"
#include "refshape/verification.hpp"

namespace refshape::cli {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string summary_text(const EvalReport& report, const EvalReport& baseline) {
  std::string s;
  s += "mae = " + format_double(report.mae) + "\n";
  s += "baseline_mae = " + format_double(baseline.mae) + "\n";
  s += "improvement = " +
       (report.improvement_vs_baseline ? format_double(*report.improvement_vs_baseline) : "nan") +
       "\n";
  s += "steps = " + std::to_string(report.rows.size()) + "\n";
  s += "bound_exceedances = " + std::to_string(report.bound_exceedances) + "\n";
  s += "rate_exceedances = " + std::to_string(report.rate_exceedances) + "\n";
  s += "max_abs_output = " + format_double(report.max_abs_output) + "\n";
  s += "max_abs_rate = " + format_double(report.max_abs_rate) + "\n";
  if (report.household_violations) {
    s += "household_violations = " + std::to_string(*report.household_violations) + "\n";
  }
  return s;
}

}  // namespace

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = o.config ? RunConfig::load(*o.config)
                         : RunConfig::defaults(o.env ? parse_env_kind(*o.env) : EnvKind::kHil);
  if (o.config && o.env && parse_env_kind(*o.env) != c.env) {
    throw ConfigError("--env " + *o.env + " contradicts the config file (env = " +
                      std::string(to_string(c.env)) + ")");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.scenario) c.hil.scenario = parse_scenario(*o.scenario);
  if (o.population) c.heaters.population = *o.population;
  if (o.episodes) c.train.episodes = *o.episodes;
  if (o.steps) {
    c.train.steps_per_episode = *o.steps;
  }
  c.validate();
  return c;
}

std::filesystem::path output_dir(const RunConfig& config, const Overrides& o,
                                 const std::string& command) {
  if (o.out) return *o.out;
  std::filesystem::path root = config.output_dir;
  if (const char* env_root = std::getenv("REFSHAPE_OUTPUT_ROOT"); env_root && *env_root) {
    root = env_root;
  }
  return root / (std::string(to_string(config.env)) + "-" + command + "-s" +
                 std::to_string(config.seed));
}

int cmd_train(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  std::filesystem::create_directories(out);
  write_text(out / "manifest.ini", config.to_ini());
  auto env = config.make_env(config.train.steps_per_episode);
  Agent agent(kObservationDim, 1, config.agent_hyper(), config.seed);
  TrainConfig tc = config.train_config();
  tc.checkpoint_dir = out / "checkpoints";
  const auto start = std::chrono::steady_clock::now();
  const std::size_t every = std::max<std::size_t>(1, tc.episodes / 20);
  const TrainResult result = train(*env, agent, tc, [&](std::size_t ep, double r, double avg) {
    if (ep % every == 0 || ep == tc.episodes) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log << "episode " << ep << "/" << tc.episodes << "  reward " << format_double(r)
          << "  rolling " << format_double(avg) << "  elapsed " << static_cast<long>(secs)
          << " s" << std::endl;
    }
  });
  write_curve_csv(result.curve, out / "curve.csv");
  log << "best rolling average " << format_double(result.best_rolling) << " at episode "
      << result.best_episode << "\n"
      << "wrote " << (out / "curve.csv").string() << " and checkpoints in "
      << (out / "checkpoints").string() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
             bool identity, const std::filesystem::path& out, std::ostream& log) {
  if (!identity && !checkpoint) throw ConfigError("eval needs --checkpoint or --identity");
  std::filesystem::create_directories(out);
  write_text(out / "manifest.ini", config.to_ini());
  auto env = config.make_env(config.eval_steps);

  const auto snapshots = out / "snapshots.csv";
  std::filesystem::remove(snapshots);
  StepObserver observer;
  if (config.env == EnvKind::kHeaters && config.snapshot_every > 0) {
    observer = [&](const Environment& e) {
      if (e.steps_taken() % config.snapshot_every == 0) {
        append_snapshot_csv(e.steps_taken(), static_cast<const HeatersEnv&>(e).population(),
                            snapshots);
      }
    };
  }

  EvalReport report;
  if (identity) {
    report = rollout(*env, passthrough_policy(), config.eval_schedule, config.eval_seed, observer);
  } else {
    const Agent agent = load_checkpoint(*checkpoint);
    if (agent.obs_dim() != kObservationDim || agent.act_dim() != 1) {
      throw ShapeError("checkpoint dimensions do not match the environment");
    }
    const Policy policy = [&agent](const Vector& obs, const Environment&) {
      return agent.policy(obs)(0);
    };
    report = rollout(*env, policy, config.eval_schedule, config.eval_seed, observer);
  }
  const EvalReport baseline = baseline_evaluate(*env, config.eval_schedule, config.eval_seed);
  attach_baseline(report, baseline);
  write_trajectory_csv(report, out / "trajectory.csv");
  const std::string summary = summary_text(report, baseline);
  write_text(out / "summary.ini", summary);
  log << summary;
  return 0;
}

int cmd_baseline(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  return cmd_eval(config, std::nullopt, true, out, log);
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  VerifyOptions o;
  o.aircraft = config.hil.aircraft;
  o.pilot = config.hil.pilot;
  o.heaters = config.heaters.params;
  o.gains = config.hil.gains;
  const auto start = std::chrono::steady_clock::now();
  bool all = true;
  for (const CheckResult& r : run_verification(o)) {
    all = all && r.passed;
    log << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << (all ? "all checks passed" : "some checks FAILED") << " in " << format_double(secs)
      << " s\n";
  return all ? 0 : 1;
}

int run(int argc, char** argv) {
  CLI::App app{"Outer-loop reference shaping with DDPG"};
  app.require_subcommand(1);
  Overrides o;
  std::optional<std::filesystem::path> checkpoint;
  bool identity = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "training seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--env", o.env, "plant: hil or heaters")
        ->check(CLI::IsMember({"hil", "heaters"}));
    sub->add_option("--scenario", o.scenario, "hil inner loop: nominal or delayed")
        ->check(CLI::IsMember({"nominal", "delayed"}));
    sub->add_option("--population", o.population, "number of heaters")
        ->check(CLI::PositiveNumber);
  };
  auto* train_cmd = app.add_subcommand("train", "train an outer-loop policy");
  add_common(train_cmd);
  train_cmd->add_option("--episodes", o.episodes, "episode count")->check(CLI::PositiveNumber);
  train_cmd->add_option("--steps", o.steps, "steps per episode")->check(CLI::PositiveNumber);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint against the baseline");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--identity", identity, "use the passthrough policy r~ = r");

  auto* baseline_cmd = app.add_subcommand("baseline", "evaluate the inner loop alone");
  add_common(baseline_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "run the numeric property suite");
  add_common(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig config = resolve_config(o);
    if (*train_cmd) return cmd_train(config, output_dir(config, o, "train"), std::cout);
    if (*eval_cmd) {
      return cmd_eval(config, checkpoint, identity, output_dir(config, o, "eval"), std::cout);
    }
    if (*baseline_cmd) return cmd_baseline(config, output_dir(config, o, "baseline"), std::cout);
    return cmd_verify(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace refshape::cli
