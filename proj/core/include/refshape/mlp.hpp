#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "refshape/linalg.hpp"

namespace refshape {

enum class OutputActivation {
  kIdentity,
  kTanh,  // symmetric bounded sigmoid, outputs in (-1, 1)
};

// Fully connected ReLU network. layer_sizes = {input, hidden..., output}.
//
// When action_injection_layer is set (only layer 1 is accepted), a second
// input of action_size components is appended to the input of that layer,
// i.e. to the first hidden layer's activations. This is how the critic
// consumes the action.
struct MlpSpec {
  std::vector<Index> layer_sizes;
  OutputActivation output_activation = OutputActivation::kIdentity;
  std::optional<std::size_t> action_injection_layer;
  Index action_size = 0;

  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  Index input_size() const { return layer_sizes.front(); }
  Index output_size() const { return layer_sizes.back(); }
  bool injects_at(std::size_t layer) const {
    return action_injection_layer.has_value() && *action_injection_layer == layer;
  }
  // Width of the input seen by `layer`, including any injected action.
  Index fan_in(std::size_t layer) const {
    return layer_sizes[layer] + (injects_at(layer) ? action_size : 0);
  }

  // Throws ConfigError when the invariants do not hold.
  void validate() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
  Matrix weight;  // fan_out x fan_in
  Vector bias;    // fan_out
};

using LayerStack = std::vector<DenseLayer>;

// Parameters plus Adam state. Moments always mirror the parameter shapes.
struct MlpParams {
  LayerStack layers;
  LayerStack first_moment;
  LayerStack second_moment;
  std::int64_t step = 0;
  // Bumped on every mutation through this library; forward caches remember it.
  std::uint64_t generation = 0;
};

// Zero weights, zero biases, zero moments.
MlpParams zero_params(const MlpSpec& spec);

// Hidden layers uniform in +-1/sqrt(fan_in), output layer uniform in +-3e-3.
MlpParams init_params(const MlpSpec& spec, std::mt19937_64& rng);

// Same shapes as spec, all zero.
LayerStack zero_layers(const MlpSpec& spec);

struct ForwardCache {
  std::vector<Matrix> layer_inputs;   // per layer, (fan_in x batch)
  std::vector<Matrix> layer_outputs;  // per layer, post-activation
  std::uint64_t generation = 0;
  const MlpParams* source = nullptr;
};

struct ForwardResult {
  Matrix output;  // output_size x batch
  ForwardCache cache;
};

// Batched forward pass; columns are samples.
ForwardResult mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& input);
ForwardResult mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& input,
                          const Matrix& injected_action);

// Single-sample convenience wrappers without a cache.
Vector mlp_predict(const MlpParams& params, const MlpSpec& spec, const Vector& input);
Vector mlp_predict(const MlpParams& params, const MlpSpec& spec, const Vector& input,
                   const Vector& injected_action);

enum class GradScope {
  kAll,         // parameter, input and action gradients
  kInputsOnly,  // skip parameter gradients (critic inside the actor update)
};

struct BackwardResult {
  LayerStack param_grads;  // empty for GradScope::kInputsOnly
  Matrix input_grad;
  std::optional<Matrix> action_grad;
};

// Reverse-mode gradients of sum(output .* output_grad) with respect to the
// parameters, the input and the injected action. Throws ContractError when
// the cache does not belong to `params` in its current state.
BackwardResult mlp_backward(const MlpParams& params, const MlpSpec& spec, const ForwardCache& cache,
                            const Matrix& output_grad, GradScope scope = GradScope::kAll);

// target <- tau * live + (1 - tau) * target, weights and biases only.
void soft_update(MlpParams& target, const MlpParams& live, double tau);

// Maximum absolute weight/bias difference between two same-shaped networks.
double max_abs_difference(const LayerStack& a, const LayerStack& b);

std::size_t parameter_count(const MlpSpec& spec);

}  // namespace refshape
