#pragma once

#include "refshape/mlp.hpp"

namespace refshape {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// One bias-corrected Adam step in the descent direction of `grads`.
// Increments params.step by one.
void adam_update(MlpParams& params, const LayerStack& grads, const AdamHyper& hyper);

}  // namespace refshape
