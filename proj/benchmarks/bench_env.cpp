#include <benchmark/benchmark.h>

#include "refshape/heaters.hpp"
#include "refshape/hil.hpp"

using namespace refshape;

static void BM_HilStep(benchmark::State& state) {
  HilConfig c;
  c.timing.horizon_steps = 1'000'000'000;
  HilEnv env(c);
  env.reset(Schedule::constant(5.0), 1, ResetMode::kEvaluation);
  for (auto _ : state) benchmark::DoNotOptimize(env.step(5.0).observation);
}

static void BM_HeatersStep(benchmark::State& state) {
  HeatersConfig c;
  c.population = state.range(0);
  c.timing.horizon_steps = 1'000'000'000;
  HeatersEnv env(c);
  env.reset(Schedule::constant(20.0), 1, ResetMode::kEvaluation);
  for (auto _ : state) benchmark::DoNotOptimize(env.step(20.0).observation);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_HilStep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HeatersStep)->Arg(4)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
