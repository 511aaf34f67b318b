#include <gtest/gtest.h>

#include <cmath>

#include "refshape/agent.hpp"
#include "refshape/errors.hpp"
#include "refshape/mlp.hpp"
#include "refshape/verification.hpp"

using namespace refshape;

namespace {

// Straightforward per-neuron evaluation, independent of the batched code.
double naive_forward(const MlpParams& p, const MlpSpec& spec, const std::vector<double>& x,
                     const std::vector<double>& action) {
  std::vector<double> act = x;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    std::vector<double> in = act;
    if (spec.injects_at(l)) in.insert(in.end(), action.begin(), action.end());
    const DenseLayer& layer = p.layers[l];
    std::vector<double> out(static_cast<std::size_t>(layer.weight.rows()));
    for (Index j = 0; j < layer.weight.rows(); ++j) {
      double s = layer.bias(j);
      for (Index i = 0; i < layer.weight.cols(); ++i) s += layer.weight(j, i) * in[static_cast<std::size_t>(i)];
      const bool last = l + 1 == spec.num_layers();
      if (!last) {
        s = s > 0.0 ? s : 0.0;
      } else if (spec.output_activation == OutputActivation::kTanh) {
        s = std::tanh(s);
      }
      out[static_cast<std::size_t>(j)] = s;
    }
    act = out;
  }
  return act[0];
}

}  // namespace

TEST(Mlp, ForwardMatchesNaiveEvaluation) {
  std::mt19937_64 rng(3);
  const MlpSpec actor = actor_spec(5, 1, {7, 6});
  const MlpSpec critic = critic_spec(5, 1, {7, 6});
  MlpParams pa = init_params(actor, rng);
  MlpParams pc = init_params(critic, rng);
  pa.layers.back().weight.setConstant(0.4);
  pc.layers.back().weight.setConstant(0.4);
  const std::vector<double> x{0.3, -0.2, 0.9, -1.1, 0.5};
  Vector xv(5);
  for (int i = 0; i < 5; ++i) xv(i) = x[static_cast<std::size_t>(i)];
  EXPECT_NEAR(mlp_predict(pa, actor, xv)(0), naive_forward(pa, actor, x, {}), 1e-14);
  EXPECT_NEAR(mlp_predict(pc, critic, xv, Vector::Constant(1, 0.25))(0),
              naive_forward(pc, critic, x, {0.25}), 1e-14);
}

TEST(Mlp, BatchedForwardEqualsPerSample) {
  std::mt19937_64 rng(5);
  const MlpSpec spec = critic_spec(4, 2, {8, 5});
  const MlpParams p = init_params(spec, rng);
  Matrix in = Matrix::Random(4, 6);
  Matrix act = Matrix::Random(2, 6);
  const Matrix out = mlp_forward(p, spec, in, act).output;
  for (Index c = 0; c < 6; ++c) {
    // GEMM and GEMV may round differently.
    EXPECT_NEAR(out(0, c), mlp_predict(p, spec, Vector(in.col(c)), Vector(act.col(c)))(0), 1e-15);
  }
}

TEST(Mlp, InitRespectsFanInBounds) {
  std::mt19937_64 rng(9);
  const MlpSpec spec = critic_spec(5, 1, {400, 300});
  const MlpParams p = init_params(spec, rng);
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const double bound = l + 1 == spec.num_layers() ? 3e-3 : 1.0 / std::sqrt(double(spec.fan_in(l)));
    EXPECT_LE(p.layers[l].weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(p.layers[l].bias.cwiseAbs().maxCoeff(), bound);
  }
  // The critic's second hidden layer sees 400 activations plus the action.
  EXPECT_EQ(p.layers[1].weight.cols(), 401);
}

TEST(Mlp, ActorOutputIsBounded) {
  std::mt19937_64 rng(1);
  const MlpSpec spec = actor_spec(5, 1, {16, 16});
  MlpParams p = init_params(spec, rng);
  p.layers.back().weight.setConstant(50.0);
  const Vector y = mlp_predict(p, spec, Vector::Constant(5, 3.0));
  EXPECT_LE(std::abs(y(0)), 1.0);
}

TEST(Mlp, GradientsMatchFiniteDifferences) {
  const CheckResult r = check_gradients(77);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Mlp, StaleCacheIsRejected) {
  std::mt19937_64 rng(2);
  const MlpSpec spec = actor_spec(3, 1, {4, 4});
  MlpParams p = init_params(spec, rng);
  const auto fwd = mlp_forward(p, spec, Matrix::Ones(3, 2));
  MlpParams other = p;
  soft_update(p, other, 0.5);  // mutation bumps the generation
  EXPECT_THROW(mlp_backward(p, spec, fwd.cache, Matrix::Ones(1, 2)), ContractError);
}

TEST(Mlp, WrongInputShapeThrows) {
  std::mt19937_64 rng(2);
  const MlpSpec spec = actor_spec(3, 1, {4, 4});
  const MlpParams p = init_params(spec, rng);
  EXPECT_THROW(mlp_forward(p, spec, Matrix::Ones(4, 2)), ShapeError);
  const MlpSpec critic = critic_spec(3, 1, {4, 4});
  const MlpParams pc = init_params(critic, rng);
  EXPECT_THROW(mlp_forward(pc, critic, Matrix::Ones(3, 2)), ShapeError);
}

TEST(Mlp, InputsOnlyScopeSkipsParameterGradients) {
  std::mt19937_64 rng(4);
  const MlpSpec spec = critic_spec(3, 1, {4, 4});
  const MlpParams p = init_params(spec, rng);
  const auto fwd = mlp_forward(p, spec, Matrix::Ones(3, 2), Matrix::Ones(1, 2));
  const auto full = mlp_backward(p, spec, fwd.cache, Matrix::Ones(1, 2));
  const auto inputs = mlp_backward(p, spec, fwd.cache, Matrix::Ones(1, 2), GradScope::kInputsOnly);
  EXPECT_TRUE(inputs.param_grads.empty());
  ASSERT_TRUE(inputs.action_grad && full.action_grad);
  EXPECT_EQ(*inputs.action_grad, *full.action_grad);
  EXPECT_EQ(inputs.input_grad, full.input_grad);
}

TEST(Mlp, SoftUpdateEdgeCases) {
  std::mt19937_64 rng(8);
  const MlpSpec spec = actor_spec(3, 1, {4, 4});
  const MlpParams live = init_params(spec, rng);
  MlpParams target = init_params(spec, rng);
  MlpParams frozen = target;
  soft_update(frozen, frozen, 0.3);
  EXPECT_LE(max_abs_difference(frozen.layers, target.layers), 1e-15);
  soft_update(target, live, 1.0);
  EXPECT_EQ(max_abs_difference(target.layers, live.layers), 0.0);
}

TEST(Mlp, SpecValidation) {
  MlpSpec bad{{3, 4, 1}, OutputActivation::kIdentity, 2, 1};
  EXPECT_THROW(bad.validate(), ConfigError);
  MlpSpec no_hidden{{3, 1}, OutputActivation::kIdentity, std::nullopt, 0};
  EXPECT_THROW(no_hidden.validate(), ConfigError);
}

TEST(Mlp, ParameterCount) {
  EXPECT_EQ(parameter_count(actor_spec(5, 1, {400, 300})), 5u * 400 + 400 + 400 * 300 + 300 + 301);
  EXPECT_EQ(parameter_count(critic_spec(5, 1, {400, 300})), 5u * 400 + 400 + 401 * 300 + 300 + 301);
}
