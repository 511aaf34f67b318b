#include "refshape/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "refshape/csv.hpp"
#include "refshape/errors.hpp"

namespace refshape {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view s) {
  s = trim(s);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

Vector parse_vector(std::string_view s) {
  const auto items = split_list(s);
  Vector v(static_cast<Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v(static_cast<Index>(i)) = parse_number<double>(items[i]);
  return v;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

Matrix parse_matrix(std::string_view s, Index rows, Index cols) {
  const Vector flat = parse_vector(s);
  if (flat.size() != rows * cols) {
    throw ConfigError("expected " + std::to_string(rows * cols) + " values (row-major)");
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = flat(r * cols + c);
  }
  return m;
}

std::string format_matrix(const Matrix& m) {
  Vector flat(m.size());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) flat(r * m.cols() + c) = m(r, c);
  }
  return format_vector(flat);
}

struct Binding {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

// `ref` is a generic lambda returning a reference to the bound member.
template <typename T, typename Ref>
Binding number(std::string section, std::string key, Ref ref) {
  return {std::move(section), std::move(key),
          [ref](RunConfig& c, std::string_view v) { ref(c) = parse_number<T>(v); },
          [ref](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(ref(c));
            } else {
              return std::to_string(ref(c));
            }
          }};
}

template <typename Ref>
Binding real(std::string section, std::string key, Ref ref) {
  return number<double>(std::move(section), std::move(key), ref);
}

template <typename Ref>
Binding vector(std::string section, std::string key, Index size, Ref ref) {
  return {std::move(section), std::move(key),
          [ref, size](RunConfig& c, std::string_view v) {
            Vector parsed = parse_vector(v);
            if (parsed.size() != size) {
              throw ConfigError("expected " + std::to_string(size) + " values");
            }
            ref(c) = std::move(parsed);
          },
          [ref](const RunConfig& c) { return format_vector(ref(c)); }};
}

template <typename Ref>
Binding matrix(std::string section, std::string key, Index rows, Index cols, Ref ref) {
  return {std::move(section), std::move(key),
          [ref, rows, cols](RunConfig& c, std::string_view v) {
            ref(c) = parse_matrix(v, rows, cols);
          },
          [ref](const RunConfig& c) { return format_matrix(ref(c)); }};
}

std::string_view variant_name(BoundVariant v) {
  return v == BoundVariant::kAmplitude ? "amplitude" : "rate";
}

std::string_view free_heat_name(FreeHeatVariant v) {
  return v == FreeHeatVariant::kAsWritten ? "as-written" : "equilibrium-corrected";
}

// Reward keys bind to the reward of the selected environment.
template <typename Config>
auto& selected_reward(Config& c) {
  return c.env == EnvKind::kHil ? c.hil.reward : c.heaters.reward;
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> b;
    // [run]
    b.push_back({"run", "env", [](RunConfig& c, std::string_view v) { c.env = parse_env_kind(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.env)); }});
    b.push_back(number<std::uint64_t>("run", "seed", [](auto& c) -> auto& { return c.seed; }));
    b.push_back({"run", "output_dir",
                 [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                 [](const RunConfig& c) { return c.output_dir.string(); }});

    // [train]
    b.push_back(number<std::size_t>("train", "episodes", [](auto& c) -> auto& { return c.train.episodes; }));
    b.push_back(number<std::size_t>("train", "steps", [](auto& c) -> auto& { return c.train.steps_per_episode; }));
    b.push_back(number<std::size_t>("train", "checkpoint_every", [](auto& c) -> auto& { return c.train.checkpoint_every; }));
    b.push_back(number<std::size_t>("train", "curve_window", [](auto& c) -> auto& { return c.train.curve_window; }));

    // [agent]
    b.push_back(real("agent", "gamma", [](auto& c) -> auto& { return c.agent.gamma; }));
    b.push_back(real("agent", "tau", [](auto& c) -> auto& { return c.agent.tau_soft; }));
    b.push_back(real("agent", "actor_lr", [](auto& c) -> auto& { return c.agent.actor_lr; }));
    b.push_back(real("agent", "critic_lr", [](auto& c) -> auto& { return c.agent.critic_lr; }));
    b.push_back(number<std::size_t>("agent", "minibatch", [](auto& c) -> auto& { return c.agent.minibatch_size; }));
    b.push_back(number<std::size_t>("agent", "replay_capacity", [](auto& c) -> auto& { return c.agent.replay_capacity; }));
    b.push_back({"agent", "hidden",
                 [](RunConfig& c, std::string_view v) {
                   c.agent.hidden_sizes.clear();
                   for (auto item : split_list(v)) c.agent.hidden_sizes.push_back(parse_number<Index>(item));
                 },
                 [](const RunConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.agent.hidden_sizes.size(); ++i) {
                     if (i > 0) out += ", ";
                     out += std::to_string(c.agent.hidden_sizes[i]);
                   }
                   return out;
                 }});
    b.push_back(real("agent", "ou_theta", [](auto& c) -> auto& { return c.agent.ou_theta; }));
    b.push_back(real("agent", "ou_sigma", [](auto& c) -> auto& { return c.agent.ou_sigma; }));
    b.push_back(real("agent", "ou_dt", [](auto& c) -> auto& { return c.agent.ou_dt; }));
    b.push_back(real("agent", "adam_beta1", [](auto& c) -> auto& { return c.agent.adam_beta1; }));
    b.push_back(real("agent", "adam_beta2", [](auto& c) -> auto& { return c.agent.adam_beta2; }));
    b.push_back(real("agent", "adam_epsilon", [](auto& c) -> auto& { return c.agent.adam_epsilon; }));

    // [reward]
    b.push_back(real("reward", "alpha_g", [](auto& c) -> auto& { return selected_reward(c).alpha_g; }));
    b.push_back(real("reward", "beta_h", [](auto& c) -> auto& { return selected_reward(c).beta_h; }));
    b.push_back(real("reward", "rho_h", [](auto& c) -> auto& { return selected_reward(c).rho_h; }));
    b.push_back(real("reward", "beta_b", [](auto& c) -> auto& { return selected_reward(c).beta_b; }));
    b.push_back(real("reward", "rho_b", [](auto& c) -> auto& { return selected_reward(c).rho_b; }));
    b.push_back(real("reward", "delta_b", [](auto& c) -> auto& { return selected_reward(c).delta_b; }));
    b.push_back(real("reward", "bound_l", [](auto& c) -> auto& { return selected_reward(c).bound_l; }));
    b.push_back({"reward", "bound_variant",
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "amplitude") {
                     selected_reward(c).b_variant = BoundVariant::kAmplitude;
                   } else if (v == "rate") {
                     selected_reward(c).b_variant = BoundVariant::kRate;
                   } else {
                     throw ConfigError("bound_variant must be amplitude or rate");
                   }
                 },
                 [](const RunConfig& c) { return std::string(variant_name(c.reward().b_variant)); }});

    // [eval]
    b.push_back({"eval", "schedule",
                 [](RunConfig& c, std::string_view v) { c.eval_schedule = Schedule::parse(v); },
                 [](const RunConfig& c) { return c.eval_schedule.to_string(); }});
    b.push_back(number<std::size_t>("eval", "steps", [](auto& c) -> auto& { return c.eval_steps; }));
    b.push_back(number<std::uint64_t>("eval", "seed", [](auto& c) -> auto& { return c.eval_seed; }));
    b.push_back(number<std::size_t>("eval", "snapshot_every", [](auto& c) -> auto& { return c.snapshot_every; }));

    // [hil]
    b.push_back({"hil", "scenario",
                 [](RunConfig& c, std::string_view v) { c.hil.scenario = parse_scenario(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.hil.scenario)); }});
    b.push_back(real("hil", "agent_period", [](auto& c) -> auto& { return c.hil.timing.agent_period; }));
    b.push_back(real("hil", "sim_substep", [](auto& c) -> auto& { return c.hil.timing.sim_substep; }));
    b.push_back(real("hil", "pilot_delay", [](auto& c) -> auto& { return c.hil.pilot.delay; }));
    b.push_back(real("hil", "pilot_a_h", [](auto& c) -> auto& { return c.hil.pilot.a_h; }));
    b.push_back(real("hil", "pilot_b_h", [](auto& c) -> auto& { return c.hil.pilot.b_h; }));
    b.push_back(real("hil", "pilot_c_h", [](auto& c) -> auto& { return c.hil.pilot.c_h; }));
    b.push_back(real("hil", "pilot_d_h", [](auto& c) -> auto& { return c.hil.pilot.d_h; }));
    b.push_back(real("hil", "state_delay", [](auto& c) -> auto& { return c.hil.controller_state_delay; }));
    b.push_back(real("hil", "integral_delay", [](auto& c) -> auto& { return c.hil.controller_integral_delay; }));
    b.push_back(matrix("hil", "a", 4, 4, [](auto& c) -> auto& { return c.hil.aircraft.a; }));
    b.push_back(vector("hil", "b", 4, [](auto& c) -> auto& { return c.hil.aircraft.b; }));
    b.push_back(vector("hil", "w", 3, [](auto& c) -> auto& { return c.hil.aircraft.w; }));
    b.push_back({"hil", "q_diag",
                 [](RunConfig& c, std::string_view v) {
                   const Vector d = parse_vector(v);
                   if (d.size() != 5) throw ConfigError("expected 5 values");
                   c.hil.aircraft.q = d.asDiagonal();
                 },
                 [](const RunConfig& c) { return format_vector(c.hil.aircraft.q.diagonal()); }});
    b.push_back(real("hil", "r", [](auto& c) -> auto& { return c.hil.aircraft.r; }));
    b.push_back({"hil", "gains",
                 [](RunConfig& c, std::string_view v) {
                   const Vector g = parse_vector(v);
                   if (g.size() == 0) {
                     c.hil.gains.reset();
                     return;
                   }
                   if (g.size() != 5) throw ConfigError("gains: expected K1 (4 values) then K2");
                   c.hil.gains = LqrGains{g.head(4), g(4)};
                 },
                 [](const RunConfig& c) {
                   if (!c.hil.gains) return std::string();
                   Vector g(5);
                   g << c.hil.gains->k1, c.hil.gains->k2;
                   return format_vector(g);
                 }});
    b.push_back(real("hil", "action_low", [](auto& c) -> auto& { return c.hil.action_low; }));
    b.push_back(real("hil", "action_high", [](auto& c) -> auto& { return c.hil.action_high; }));
    b.push_back(real("hil", "goal_low", [](auto& c) -> auto& { return c.hil.goal_low; }));
    b.push_back(real("hil", "goal_high", [](auto& c) -> auto& { return c.hil.goal_high; }));
    b.push_back(real("hil", "init_pitch_low", [](auto& c) -> auto& { return c.hil.init_pitch_low; }));
    b.push_back(real("hil", "init_pitch_high", [](auto& c) -> auto& { return c.hil.init_pitch_high; }));
    b.push_back(real("hil", "observation_scale", [](auto& c) -> auto& { return c.hil.observation_scale; }));

    // [heaters]
    b.push_back(number<Index>("heaters", "population", [](auto& c) -> auto& { return c.heaters.population; }));
    b.push_back(real("heaters", "agent_period", [](auto& c) -> auto& { return c.heaters.timing.agent_period; }));
    b.push_back(real("heaters", "sim_substep", [](auto& c) -> auto& { return c.heaters.timing.sim_substep; }));
    b.push_back(real("heaters", "c_a", [](auto& c) -> auto& { return c.heaters.params.c_a; }));
    b.push_back(real("heaters", "u_a", [](auto& c) -> auto& { return c.heaters.params.u_a; }));
    b.push_back(real("heaters", "x_out", [](auto& c) -> auto& { return c.heaters.params.x_out; }));
    b.push_back(real("heaters", "sigma", [](auto& c) -> auto& { return c.heaters.params.sigma; }));
    b.push_back(real("heaters", "pi_a", [](auto& c) -> auto& { return c.heaters.params.pi_a; }));
    b.push_back(real("heaters", "r_ctl", [](auto& c) -> auto& { return c.heaters.params.r_ctl; }));
    b.push_back(real("heaters", "phi", [](auto& c) -> auto& { return c.heaters.params.phi; }));
    b.push_back(real("heaters", "gamma_mass", [](auto& c) -> auto& { return c.heaters.params.gamma_mass; }));
    b.push_back(real("heaters", "eta", [](auto& c) -> auto& { return c.heaters.params.eta; }));
    b.push_back(real("heaters", "beta2", [](auto& c) -> auto& { return c.heaters.params.beta2; }));
    b.push_back(real("heaters", "lambda1", [](auto& c) -> auto& { return c.heaters.params.lambda1; }));
    b.push_back({"heaters", "u_free",
                 [](RunConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v == "as-written") {
                     c.heaters.params.u_free_variant = FreeHeatVariant::kAsWritten;
                   } else if (v == "equilibrium-corrected") {
                     c.heaters.params.u_free_variant = FreeHeatVariant::kEquilibriumCorrected;
                   } else {
                     throw ConfigError("u_free must be as-written or equilibrium-corrected");
                   }
                 },
                 [](const RunConfig& c) { return std::string(free_heat_name(c.heaters.params.u_free_variant)); }});
    b.push_back(real("heaters", "action_low", [](auto& c) -> auto& { return c.heaters.action_low; }));
    b.push_back(real("heaters", "action_high", [](auto& c) -> auto& { return c.heaters.action_high; }));
    b.push_back(real("heaters", "goal_low", [](auto& c) -> auto& { return c.heaters.goal_low; }));
    b.push_back(real("heaters", "goal_high", [](auto& c) -> auto& { return c.heaters.goal_high; }));
    b.push_back(real("heaters", "init_temp_low", [](auto& c) -> auto& { return c.heaters.init_temp_low; }));
    b.push_back(real("heaters", "init_temp_high", [](auto& c) -> auto& { return c.heaters.init_temp_high; }));
    b.push_back(real("heaters", "observation_offset", [](auto& c) -> auto& { return c.heaters.observation_offset; }));
    b.push_back(real("heaters", "observation_scale", [](auto& c) -> auto& { return c.heaters.observation_scale; }));
    b.push_back(real("heaters", "comfort_limit", [](auto& c) -> auto& { return c.heaters.comfort_limit; }));
    return b;
  }();
  return table;
}

struct Line {
  int number = 0;
  std::string section;
  std::string_view key;
  std::string_view value;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::string section;
  std::set<std::string> seen;
  std::vector<std::string_view> raw_lines;
  for (std::size_t pos = 0;;) {
    const auto nl = text.find('\n', pos);
    raw_lines.push_back(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  for (std::size_t i = 0; i < raw_lines.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    const auto line = trim(raw_lines[i]);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", number);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", number);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", number);
    if (section.empty()) throw ConfigError("key outside of any [section]", number);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", number);
    if (!seen.insert(section + "." + std::string(key)).second) {
      throw ConfigError("duplicate key '" + section + "." + std::string(key) + "'", number);
    }
    out.push_back({number, section, key, trim(line.substr(eq + 1))});
  }
  return out;
}

}  // namespace

std::string_view to_string(EnvKind kind) { return kind == EnvKind::kHil ? "hil" : "heaters"; }

EnvKind parse_env_kind(std::string_view text) {
  text = trim(text);
  if (text == "hil") return EnvKind::kHil;
  if (text == "heaters") return EnvKind::kHeaters;
  throw ConfigError("env must be hil or heaters, got '" + std::string(text) + "'");
}

std::string_view to_string(HilScenario s) {
  return s == HilScenario::kNominal ? "nominal" : "delayed";
}

HilScenario parse_scenario(std::string_view text) {
  text = trim(text);
  if (text == "nominal") return HilScenario::kNominal;
  if (text == "delayed") return HilScenario::kDelayed;
  throw ConfigError("scenario must be nominal or delayed, got '" + std::string(text) + "'");
}

RunConfig RunConfig::defaults(EnvKind env) {
  RunConfig c;
  c.env = env;
  if (env == EnvKind::kHil) {
    c.train.episodes = 1000;
    // Three 30 s plateaus; the inner loop needs about 10 s to settle.
    c.eval_schedule = Schedule::parse("0:15, 300:-12, 600:10");
    c.eval_steps = 900;
  } else {
    c.train.episodes = 2000;
    c.eval_schedule = Schedule::parse("0:20, 100:22");
    c.eval_steps = 200;
  }
  c.train.steps_per_episode = 200;
  c.eval_seed = 1000;
  return c;
}

RunConfig RunConfig::parse(std::string_view text) {
  const auto lines = tokenize(text);
  EnvKind env = EnvKind::kHil;
  for (const Line& l : lines) {
    if (l.section == "run" && l.key == "env") {
      try {
        env = parse_env_kind(l.value);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), l.number);
      }
    }
  }
  RunConfig c = defaults(env);
  for (const Line& l : lines) {
    const auto& table = bindings();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) {
      return b.section == l.section && b.key == l.key;
    });
    if (it == table.end()) {
      throw ConfigError("unknown key '" + std::string(l.key) + "' in [" + l.section + "]",
                        l.number);
    }
    try {
      it->set(c, l.value);
    } catch (const ConfigError& e) {
      throw ConfigError(l.section + "." + std::string(l.key) + ": " + e.what(), l.number);
    } catch (const std::exception& e) {
      throw ConfigError(l.section + "." + std::string(l.key) + ": " + e.what(), l.number);
    }
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::to_ini() const {
  std::string out;
  std::string section;
  for (const Binding& b : bindings()) {
    if (b.section != section) {
      if (!section.empty()) out += '\n';
      section = b.section;
      out += "[" + section + "]\n";
    }
    out += b.key + " = " + b.get(*this) + "\n";
  }
  return out;
}

const RewardSpec& RunConfig::reward() const {
  return env == EnvKind::kHil ? hil.reward : heaters.reward;
}

void RunConfig::validate() const {
  train.validate();
  if (env == EnvKind::kHil) {
    hil.validate();
  } else {
    heaters.validate();
  }
  agent_hyper().validate();
  if (eval_steps < 1) throw ConfigError("eval.steps must be >= 1");
}

AgentHyper RunConfig::agent_hyper() const {
  AgentHyper h = agent;
  const double lo = env == EnvKind::kHil ? hil.action_low : heaters.action_low;
  const double hi = env == EnvKind::kHil ? hil.action_high : heaters.action_high;
  h.action_low = Vector::Constant(1, lo);
  h.action_high = Vector::Constant(1, hi);
  return h;
}

std::unique_ptr<Environment> RunConfig::make_env(std::size_t horizon) const {
  if (env == EnvKind::kHil) {
    HilConfig cfg = hil;
    cfg.timing.horizon_steps = horizon;
    return std::make_unique<HilEnv>(std::move(cfg));
  }
  HeatersConfig cfg = heaters;
  cfg.timing.horizon_steps = horizon;
  return std::make_unique<HeatersEnv>(std::move(cfg));
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

}  // namespace refshape
