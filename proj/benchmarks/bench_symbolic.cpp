#include <benchmark/benchmark.h>

#include "clawkit/clawsearch.hpp"
#include "clawkit/jetcalc.hpp"

using namespace clawkit;

namespace {

const Expr kDensity = parse("u^4 - 6*u*p1^2 + 9/5*p2^2 + x*t*u^2");

void BM_Euler(benchmark::State& state) {
  JetContext ctx;
  for (auto _ : state) benchmark::DoNotOptimize(euler(kDensity, ctx));
}
BENCHMARK(BM_Euler);

void BM_TotalT(benchmark::State& state) {
  JetContext ctx(parse("p3 + u*p1"));
  for (auto _ : state) benchmark::DoNotOptimize(total_t(kDensity, ctx));
}
BENCHMARK(BM_TotalT);

void BM_ExtractFlux(benchmark::State& state) {
  JetContext ctx(parse("p3 + u*p1"));
  Expr conserved = total_t(parse("u^3 - 3*p1^2"), ctx);
  for (auto _ : state) benchmark::DoNotOptimize(extract_flux(conserved, ctx));
}
BENCHMARK(BM_ExtractFlux);

void BM_DeterminingSystem(benchmark::State& state) {
  auto eq = parse_equation("1", "u*p1");
  auto a = build_ansatz(eq, static_cast<int>(state.range(0)), 2, 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(determining_system(eq, a));
  state.counters["unknowns"] = static_cast<double>(a.unknowns());
}
BENCHMARK(BM_DeterminingSystem)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SolveDensities(benchmark::State& state) {
  auto eq = parse_equation("1", state.range(1) == 0 ? "u*p1" : "u^2*p1/2");
  int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_densities(eq, m));
}
BENCHMARK(BM_SolveDensities)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
