#include <benchmark/benchmark.h>

#include "cgfact/effects.hpp"
#include "cgfact/inference.hpp"
#include "cgfact/simulation.hpp"

using namespace cgfact;

namespace {

Dataset scenario_data(int id, std::size_t n) { return generate_scenario(scenario(id), n, 12345); }

void BM_CgSurvival(benchmark::State& state) {
  const auto data = scenario_data(3, static_cast<std::size_t>(state.range(0)));
  const auto copula = make_copula(CopulaFamily::Clayton, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(cg_survival(data.group(0), copula));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CgSurvival)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_EstimateEffects(benchmark::State& state) {
  const auto data = scenario_data(9, static_cast<std::size_t>(state.range(0)));
  const auto copula = make_copula(CopulaFamily::Clayton, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_effects(data, copula, 1.0));
}
BENCHMARK(BM_EstimateEffects)->Arg(50)->Arg(100)->Arg(400);

void BM_Jackknife(benchmark::State& state) {
  const auto data = scenario_data(3, static_cast<std::size_t>(state.range(0)));
  const auto copula = make_copula(CopulaFamily::Clayton, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(jackknife_covariance(data, copula, 1.0));
}
BENCHMARK(BM_Jackknife)->Arg(50)->Arg(100)->Arg(400);

void BM_NullSample(benchmark::State& state) {
  const std::vector<double> lambdas{0.9, 0.6, 0.3, 0.1};
  for (auto _ : state)
    benchmark::DoNotOptimize(NullSample(lambdas, 1.9, static_cast<std::size_t>(state.range(0)), 7).mean());
}
BENCHMARK(BM_NullSample)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
