#include <benchmark/benchmark.h>

#include <random>

#include "refshape/agent.hpp"
#include "refshape/environment.hpp"
#include "refshape/mlp.hpp"

using namespace refshape;

static void BM_ActorForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MlpSpec spec = actor_spec(kObservationDim, 1, {400, 300});
  const MlpParams p = init_params(spec, rng);
  const Matrix in = Matrix::Random(kObservationDim, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(p, spec, in).output);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

static void BM_CriticForwardBackward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MlpSpec spec = critic_spec(kObservationDim, 1, {400, 300});
  const MlpParams p = init_params(spec, rng);
  const Index n = state.range(0);
  const Matrix in = Matrix::Random(kObservationDim, n);
  const Matrix act = Matrix::Random(1, n);
  const Matrix upstream = Matrix::Ones(1, n);
  for (auto _ : state) {
    const auto fwd = mlp_forward(p, spec, in, act);
    benchmark::DoNotOptimize(mlp_backward(p, spec, fwd.cache, upstream).param_grads);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

BENCHMARK(BM_ActorForward)->Arg(1)->Arg(64);
BENCHMARK(BM_CriticForwardBackward)->Arg(64);
BENCHMARK_MAIN();
