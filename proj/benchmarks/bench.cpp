#include <benchmark/benchmark.h>

#include "tdeform/tdeform.hpp"

using namespace tdeform;

namespace {

const DeformedParams kChaotic{{2.0, 0.2, 30.0}, 0.9};

void BM_Rk4Step(benchmark::State& state) {
  const auto f = particular_field(kChaotic);
  State s{0.01, 0.01, 14.01};
  for (auto _ : state) {
    s = rk4_step(f, s, 0.0, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Rk4Step);

void BM_AdaptiveIntegrate(benchmark::State& state) {
  const auto f = particular_field(kChaotic);
  const auto method = state.range(0) == 0 ? StepMethod::DormandPrince54 : StepMethod::DormandPrince853;
  const auto cfg = IntegrationConfig::adaptive(0.0, 10.0, 1e-10, 1e-10, 0.0, method);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f, {0.01, 0.01, 14.01}, cfg));
}
BENCHMARK(BM_AdaptiveIntegrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
  const auto f = particular_field(kChaotic);
  const Matrix3 j = f.jacobian({1.157987695707104, 2.4179876957071045, 14.0});
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_3x3(j));
}
BENCHMARK(BM_Eigenvalues);

void BM_Equilibria(benchmark::State& state) {
  for (auto _ : state) {
    const auto closed = equilibria_closed_form(kChaotic);
    benchmark::DoNotOptimize(find_equilibria(particular_field(kChaotic), closed.points, 1e-12));
  }
}
BENCHMARK(BM_Equilibria);

void BM_LyapunovShort(benchmark::State& state) {
  const auto f = particular_field(kChaotic);
  LyapunovConfig cfg;
  cfg.transient = 10.0;
  cfg.total_time = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(f, cfg));
}
BENCHMARK(BM_LyapunovShort)->Unit(benchmark::kMillisecond);

void BM_SweepSmall(benchmark::State& state) {
  SweepConfig cfg;
  cfg.n_points = 8;
  cfg.lyapunov.transient = 10.0;
  cfg.lyapunov.total_time = 50.0;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}
BENCHMARK(BM_SweepSmall)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
