#include "refshape/adam.hpp"

#include <cmath>

#include "refshape/errors.hpp"

namespace refshape {

void AdamHyper::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning_rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must be in (0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must be in (0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
}

namespace {

template <typename Param, typename Grad, typename Moment>
void adam_block(Param& theta, const Grad& g, Moment& m, Moment& v, double b1, double b2,
                double step_size, double eps_hat) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  theta.array() -= step_size * m.array() / (v.array().sqrt() + eps_hat);
}

}  // namespace

void adam_update(MlpParams& params, const LayerStack& grads, const AdamHyper& hyper) {
  if (grads.size() != params.layers.size()) throw ShapeError("adam_update: layer count");
  ++params.step;
  const double t = static_cast<double>(params.step);
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  // theta -= lr * (m / bc1) / (sqrt(v / bc2) + eps), rearranged to scale once.
  const double step_size = hyper.learning_rate * std::sqrt(bc2) / bc1;
  const double eps_hat = hyper.epsilon * std::sqrt(bc2);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grads[l];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
        g.bias.size() != p.bias.size()) {
      throw ShapeError("adam_update: gradient shape mismatch in layer " + std::to_string(l));
    }
    adam_block(p.weight, g.weight, params.first_moment[l].weight, params.second_moment[l].weight,
               hyper.beta1, hyper.beta2, step_size, eps_hat);
    adam_block(p.bias, g.bias, params.first_moment[l].bias, params.second_moment[l].bias,
               hyper.beta1, hyper.beta2, step_size, eps_hat);
  }
  ++params.generation;
}

}  // namespace refshape
