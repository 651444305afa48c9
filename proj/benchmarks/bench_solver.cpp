#include <benchmark/benchmark.h>

#include "stieltjes/ivp.hpp"

using namespace stieltjes;

static void BM_FundamentalMatrix(benchmark::State& state) {
  double k = static_cast<double>(state.range(0));
  Measure p = Measure::dirac(0.5, 0.3), q = Measure::density({0.2, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_matrix(p, q, k * k * k, 1.0));
}
BENCHMARK(BM_FundamentalMatrix)->Arg(4)->Arg(20)->Arg(60);

BENCHMARK_MAIN();
