#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "clawkit/curveflow.hpp"
#include "clawkit/pdesolve.hpp"
#include "clawkit/spectral.hpp"

using namespace clawkit;

namespace {

void BM_SpectralDerivative(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Spectral sp(n, 2 * std::numbers::pi);
  std::vector<double> u(n);
  for (int j = 0; j < n; ++j) u[j] = std::sin(2 * std::numbers::pi * j / n) + 0.3 * std::cos(6 * std::numbers::pi * j / n);
  for (auto _ : state) benchmark::DoNotOptimize(sp.derivative(u, 3));
}
BENCHMARK(BM_SpectralDerivative)->RangeMultiplier(4)->Range(64, 4096);

// 100 integrating-factor steps of the soliton problem.
void BM_KdvSteps(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  const double L = 80;
  auto x = grid_points(L, n);
  std::vector<double> u0(n);
  for (int j = 0; j < n; ++j) u0[j] = 3 / std::pow(std::cosh(x[j] / 2), 2);
  auto eq = parse_equation("1", "u*p1");
  for (auto _ : state) benchmark::DoNotOptimize(integrate(eq, u0, L, 0.1, 1e-3));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_KdvSteps)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

// 50 steps of the curve flow on a perturbed circle.
void BM_CurveSteps(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto c = sample_curve([](double th) { return (1 + 0.1 * std::cos(3 * th)) * std::cos(th); },
                        [](double th) { return (1 + 0.1 * std::cos(3 * th)) * std::sin(th); }, n);
  EvolveOptions opts;
  opts.redistribute = state.range(1) != 0;
  double dt = opts.redistribute ? 1e-3 : 1e-5;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(c, 50 * dt, dt, opts));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_CurveSteps)->Args({256, 1})->Args({512, 1})->Args({64, 0})->Unit(benchmark::kMillisecond);

void BM_Moments(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto c = sample_curve([](double th) { return 2 * std::cos(th); }, [](double th) { return std::sin(th); }, n);
  for (auto _ : state) benchmark::DoNotOptimize(moments(c));
}
BENCHMARK(BM_Moments)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
