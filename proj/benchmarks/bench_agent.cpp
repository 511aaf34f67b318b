#include <benchmark/benchmark.h>

#include "refshape/agent.hpp"
#include "refshape/environment.hpp"

using namespace refshape;

// One DDPG update on a 64-sample minibatch with the default networks.
static void BM_TrainStep(benchmark::State& state) {
  AgentHyper h;
  h.action_low = Vector::Constant(1, -60.0);
  h.action_high = Vector::Constant(1, 60.0);
  Agent agent(kObservationDim, 1, h, 1);
  for (int i = 0; i < 256; ++i) {
    const Vector s = Vector::Random(kObservationDim);
    agent.store({s, agent.act(s, true), -1.0, Vector::Random(kObservationDim)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(agent.train_step());
}

BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
