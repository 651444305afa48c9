#include <benchmark/benchmark.h>

#include "stieltjes/lab.hpp"

using namespace stieltjes;

static void BM_SpectrumScan(benchmark::State& state) {
  Measure p = Measure::lebesgue(0.4), q = Measure::density({0.2, 0.1});
  int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_scan(p, q, 1, 0, n_max));
}
BENCHMARK(BM_SpectrumScan)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_TailEigenvalue(benchmark::State& state) {
  Measure p = Measure::dirac(0.3, 0.2), q = Measure::lebesgue(0.1);
  SpectrumConfig cfg;
  cfg.central_max = 0;
  cfg.eigenfunctions = false;
  for (auto _ : state) benchmark::DoNotOptimize(find_eigenvalue(p, q, 2, 10, cfg));
}
BENCHMARK(BM_TailEigenvalue)->Unit(benchmark::kMillisecond);

static void BM_FdCheck(benchmark::State& state) {
  Measure p = Measure::lebesgue(0.5), q = Measure::zero();
  Eigenpair eig = find_eigenvalue(p, q, 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fd_check(p, q, eig, ramp_sequence(10), Direction::P, {1e-2, 1e-4}));
}
BENCHMARK(BM_FdCheck)->Unit(benchmark::kMillisecond);

static void BM_BoundAudit(benchmark::State& state) {
  Measure p = Measure::dirac(0.4, 0.5), q = Measure::density({0.3});
  std::vector<BoundSample> s;
  for (int i = 0; i <= 20; ++i) s.push_back({i / 20.0, Complex(500.0, 200.0)});
  for (auto _ : state) benchmark::DoNotOptimize(bound_audit(p, q, s));
}
BENCHMARK(BM_BoundAudit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
