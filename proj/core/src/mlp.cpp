#include "refshape/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "refshape/errors.hpp"

namespace refshape {

void MlpSpec::validate() const {
  if (layer_sizes.size() < 3) throw ConfigError("mlp: need at least one hidden layer");
  for (Index n : layer_sizes) {
    if (n < 1) throw ConfigError("mlp: layer sizes must be >= 1");
  }
  if (action_injection_layer.has_value()) {
    if (*action_injection_layer != 1 || layer_sizes.size() < 4) {
      throw ConfigError("mlp: the action can only be injected into the second hidden layer");
    }
    if (action_size < 1) throw ConfigError("mlp: injected action needs action_size >= 1");
  } else if (action_size != 0) {
    throw ConfigError("mlp: action_size set without an injection layer");
  }
}

LayerStack zero_layers(const MlpSpec& spec) {
  LayerStack out(spec.num_layers());
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    out[l].weight = Matrix::Zero(spec.layer_sizes[l + 1], spec.fan_in(l));
    out[l].bias = Vector::Zero(spec.layer_sizes[l + 1]);
  }
  return out;
}

MlpParams zero_params(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  p.layers = zero_layers(spec);
  p.first_moment = zero_layers(spec);
  p.second_moment = zero_layers(spec);
  return p;
}

MlpParams init_params(const MlpSpec& spec, std::mt19937_64& rng) {
  MlpParams p = zero_params(spec);
  const std::size_t last = spec.num_layers() - 1;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double bound =
        l == last ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(spec.fan_in(l)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto& layer = p.layers[l];
    for (Index c = 0; c < layer.weight.cols(); ++c) {
      for (Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = dist(rng);
    }
    for (Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = dist(rng);
  }
  return p;
}

namespace {

void check_layers(const MlpParams& params, const MlpSpec& spec) {
  if (params.layers.size() != spec.num_layers()) {
    throw ShapeError("mlp: parameter stack has " + std::to_string(params.layers.size()) +
                     " layers, spec expects " + std::to_string(spec.num_layers()));
  }
}

ForwardResult forward_impl(const MlpParams& params, const MlpSpec& spec, const Matrix& input,
                           const Matrix* action) {
  check_layers(params, spec);
  if (input.rows() != spec.input_size()) {
    throw ShapeError("mlp_forward: input has " + std::to_string(input.rows()) +
                     " rows, expected " + std::to_string(spec.input_size()));
  }
  if (spec.action_injection_layer.has_value() != (action != nullptr)) {
    throw ShapeError("mlp_forward: injected action must be given iff the spec injects one");
  }
  if (action != nullptr &&
      (action->rows() != spec.action_size || action->cols() != input.cols())) {
    throw ShapeError("mlp_forward: injected action has wrong shape");
  }

  const Index batch = input.cols();
  const std::size_t n = spec.num_layers();
  ForwardResult result;
  auto& cache = result.cache;
  cache.layer_inputs.resize(n);
  cache.layer_outputs.resize(n);
  cache.generation = params.generation;
  cache.source = &params;

  for (std::size_t l = 0; l < n; ++l) {
    Matrix& in = cache.layer_inputs[l];
    const Matrix& prev = l == 0 ? input : cache.layer_outputs[l - 1];
    if (spec.injects_at(l)) {
      in.resize(spec.fan_in(l), batch);
      in.topRows(prev.rows()) = prev;
      in.bottomRows(spec.action_size) = *action;
    } else {
      in = prev;
    }
    const DenseLayer& layer = params.layers[l];
    Matrix& out = cache.layer_outputs[l];
    out.noalias() = layer.weight * in;
    out.colwise() += layer.bias;
    if (l + 1 < n) {
      out = out.cwiseMax(0.0);
    } else if (spec.output_activation == OutputActivation::kTanh) {
      out = out.array().tanh().matrix();
    }
  }
  result.output = cache.layer_outputs.back();
  return result;
}

}  // namespace

ForwardResult mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& input) {
  return forward_impl(params, spec, input, nullptr);
}

ForwardResult mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& input,
                          const Matrix& injected_action) {
  return forward_impl(params, spec, input, &injected_action);
}

Vector mlp_predict(const MlpParams& params, const MlpSpec& spec, const Vector& input) {
  return forward_impl(params, spec, input, nullptr).output.col(0);
}

Vector mlp_predict(const MlpParams& params, const MlpSpec& spec, const Vector& input,
                   const Vector& injected_action) {
  const Matrix action = injected_action;
  return forward_impl(params, spec, input, &action).output.col(0);
}

BackwardResult mlp_backward(const MlpParams& params, const MlpSpec& spec, const ForwardCache& cache,
                            const Matrix& output_grad, GradScope scope) {
  check_layers(params, spec);
  const std::size_t n = spec.num_layers();
  if (cache.source != &params || cache.generation != params.generation ||
      cache.layer_inputs.size() != n) {
    throw ContractError("mlp_backward: forward cache does not match these parameters");
  }
  const Matrix& output = cache.layer_outputs.back();
  if (output_grad.rows() != output.rows() || output_grad.cols() != output.cols()) {
    throw ShapeError("mlp_backward: output gradient shape does not match the forward output");
  }

  BackwardResult result;
  if (scope == GradScope::kAll) result.param_grads.resize(n);

  Matrix delta;
  if (spec.output_activation == OutputActivation::kTanh) {
    delta = output_grad.cwiseProduct((1.0 - output.array().square()).matrix());
  } else {
    delta = output_grad;
  }

  for (std::size_t l = n; l-- > 0;) {
    if (l + 1 < n) {
      // ReLU: pass gradient where the unit was active.
      delta = (cache.layer_outputs[l].array() > 0.0).select(delta, 0.0);
    }
    const DenseLayer& layer = params.layers[l];
    if (scope == GradScope::kAll) {
      auto& g = result.param_grads[l];
      g.weight.noalias() = delta * cache.layer_inputs[l].transpose();
      g.bias = delta.rowwise().sum();
    }
    Matrix in_grad;
    in_grad.noalias() = layer.weight.transpose() * delta;
    if (spec.injects_at(l)) {
      result.action_grad = in_grad.bottomRows(spec.action_size);
      delta = in_grad.topRows(spec.layer_sizes[l]);
    } else {
      delta = std::move(in_grad);
    }
  }
  result.input_grad = std::move(delta);
  return result;
}

void soft_update(MlpParams& target, const MlpParams& live, double tau) {
  if (target.layers.size() != live.layers.size()) throw ShapeError("soft_update: layer count");
  for (std::size_t l = 0; l < live.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& s = live.layers[l];
    if (t.weight.rows() != s.weight.rows() || t.weight.cols() != s.weight.cols()) {
      throw ShapeError("soft_update: layer shape mismatch");
    }
    t.weight = tau * s.weight + (1.0 - tau) * t.weight;
    t.bias = tau * s.bias + (1.0 - tau) * t.bias;
  }
  ++target.generation;
}

double max_abs_difference(const LayerStack& a, const LayerStack& b) {
  if (a.size() != b.size()) throw ShapeError("max_abs_difference: layer count");
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    worst = std::max(worst, (a[l].weight - b[l].weight).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[l].bias - b[l].bias).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::size_t parameter_count(const MlpSpec& spec) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    total += static_cast<std::size_t>(spec.layer_sizes[l + 1] * (spec.fan_in(l) + 1));
  }
  return total;
}

}  // namespace refshape
