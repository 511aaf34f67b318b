// Checkpoint layout (little-endian, version 1):
//   magic "RSHPCKPT", u32 version
//   u64 obs_dim, u64 act_dim
//   hyperparameters: f64 gamma tau_soft actor_lr critic_lr ou_theta ou_sigma ou_dt
//                    adam_beta1 adam_beta2 adam_epsilon; u64 minibatch replay_capacity
//   u64 n_hidden, u64 hidden[n_hidden]; f64 action_low[act_dim], action_high[act_dim]
//   4 networks (actor, critic, target actor, target critic), each:
//     u64 n_sizes, u64 sizes[n], u32 output_activation, i64 injection (-1 none),
//     u64 action_size, i64 adam_step,
//     per layer: weights, biases, first moments, second moments (f64, column-major)
#include <cstring>
#include <fstream>

#include "refshape/agent.hpp"
#include "refshape/errors.hpp"

namespace refshape {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'H', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  template <typename T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void doubles(const double* p, Index n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("checkpoint: write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  template <typename T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  void doubles(double* p, Index n) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    check();
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    check();
  }

 private:
  void check() {
    if (!in_) throw ShapeError("checkpoint: truncated file " + path_.string());
  }
  std::ifstream in_;
  std::filesystem::path path_;
};



void write_network(Writer& w, const Network& n) {
  w.pod<std::uint64_t>(n.spec.layer_sizes.size());
  for (Index s : n.spec.layer_sizes) w.pod<std::uint64_t>(static_cast<std::uint64_t>(s));
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(n.spec.output_activation));
  w.pod<std::int64_t>(n.spec.action_injection_layer
                          ? static_cast<std::int64_t>(*n.spec.action_injection_layer)
                          : -1);
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(n.spec.action_size));
  w.pod<std::int64_t>(n.params.step);
  for (std::size_t l = 0; l < n.params.layers.size(); ++l) {
    for (const LayerStack* s : {&n.params.layers, &n.params.first_moment, &n.params.second_moment}) {
      w.doubles((*s)[l].weight.data(), (*s)[l].weight.size());
      w.doubles((*s)[l].bias.data(), (*s)[l].bias.size());
    }
  }
}

void read_network(Reader& r, Network& n, const char* name) {
  MlpSpec spec;
  const auto count = r.pod<std::uint64_t>();
  if (count > 64) throw ShapeError("checkpoint: implausible layer count");
  for (std::uint64_t i = 0; i < count; ++i) {
    spec.layer_sizes.push_back(static_cast<Index>(r.pod<std::uint64_t>()));
  }
  spec.output_activation = static_cast<OutputActivation>(r.pod<std::uint32_t>());
  const auto inject = r.pod<std::int64_t>();
  if (inject >= 0) spec.action_injection_layer = static_cast<std::size_t>(inject);
  spec.action_size = static_cast<Index>(r.pod<std::uint64_t>());
  if (!(spec == n.spec)) {
    throw ShapeError(std::string("checkpoint: ") + name +
                     " architecture does not match the stored hyperparameters");
  }
  n.params = zero_params(spec);
  n.params.step = r.pod<std::int64_t>();
  for (std::size_t l = 0; l < n.params.layers.size(); ++l) {
    for (LayerStack* s : {&n.params.layers, &n.params.first_moment, &n.params.second_moment}) {
      r.doubles((*s)[l].weight.data(), (*s)[l].weight.size());
      r.doubles((*s)[l].bias.data(), (*s)[l].bias.size());
    }
  }
}

}  // namespace

void save_checkpoint(const Agent& agent, const std::filesystem::path& path) {
  Writer w(path);
  for (char c : kMagic) w.pod(c);
  w.pod(kVersion);
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(agent.obs_dim()));
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(agent.act_dim()));
  const AgentHyper& h = agent.hyper();
  for (double v : {h.gamma, h.tau_soft, h.actor_lr, h.critic_lr, h.ou_theta, h.ou_sigma, h.ou_dt,
                   h.adam_beta1, h.adam_beta2, h.adam_epsilon}) {
    w.pod(v);
  }
  w.pod<std::uint64_t>(h.minibatch_size);
  w.pod<std::uint64_t>(h.replay_capacity);
  w.pod<std::uint64_t>(h.hidden_sizes.size());
  for (Index s : h.hidden_sizes) w.pod<std::uint64_t>(static_cast<std::uint64_t>(s));
  w.doubles(h.action_low.data(), h.action_low.size());
  w.doubles(h.action_high.data(), h.action_high.size());
  write_network(w, agent.actor());
  write_network(w, agent.critic());
  write_network(w, agent.target_actor());
  write_network(w, agent.target_critic());
  w.finish();
}

Agent load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ShapeError("checkpoint: " + path.string() + " is not a refshape checkpoint");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw ShapeError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto obs_dim = static_cast<Index>(r.pod<std::uint64_t>());
  const auto act_dim = static_cast<Index>(r.pod<std::uint64_t>());
  if (obs_dim < 1 || act_dim < 1 || obs_dim > 1 << 20 || act_dim > 1 << 20) {
    throw ShapeError("checkpoint: implausible dimensions");
  }
  AgentHyper h;
  for (double* v : {&h.gamma, &h.tau_soft, &h.actor_lr, &h.critic_lr, &h.ou_theta, &h.ou_sigma,
                    &h.ou_dt, &h.adam_beta1, &h.adam_beta2, &h.adam_epsilon}) {
    *v = r.pod<double>();
  }
  h.minibatch_size = r.pod<std::uint64_t>();
  h.replay_capacity = r.pod<std::uint64_t>();
  const auto n_hidden = r.pod<std::uint64_t>();
  if (n_hidden > 64) throw ShapeError("checkpoint: implausible hidden layer count");
  h.hidden_sizes.clear();
  for (std::uint64_t i = 0; i < n_hidden; ++i) {
    h.hidden_sizes.push_back(static_cast<Index>(r.pod<std::uint64_t>()));
  }
  h.action_low.resize(act_dim);
  h.action_high.resize(act_dim);
  r.doubles(h.action_low.data(), act_dim);
  r.doubles(h.action_high.data(), act_dim);

  Agent agent(obs_dim, act_dim, h, 0);
  read_network(r, agent.actor(), "actor");
  read_network(r, agent.critic(), "critic");
  read_network(r, agent.target_actor(), "target actor");
  read_network(r, agent.target_critic(), "target critic");
  return agent;
}

}  // namespace refshape
