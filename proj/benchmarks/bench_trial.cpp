#include <benchmark/benchmark.h>

#include <cmath>

#include "vetk/trial.hpp"

using namespace vetk;

namespace {

TrialConfig config(std::size_t n) {
  const double l0 = -std::log(0.9);
  return TrialConfig{n, 0.5, SurvivalModel::exponential(l0), SurvivalModel::exponential(0.5 * l0),
                     FrailtySpec::gamma(1.0), FixedTime{1.0}, SimultaneousAccrual{}, 7};
}

void BM_Simulate(benchmark::State& state) {
  const TrialConfig c = config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c).realized_tau);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10'000)->Arg(100'000);

void BM_EstimateCox(benchmark::State& state) {
  const AnalysisData data = simulate(config(static_cast<std::size_t>(state.range(0)))).analysis();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_cox(data).beta);
}
BENCHMARK(BM_EstimateCox)->Arg(10'000)->Arg(100'000);

void BM_EstimateAll(benchmark::State& state) {
  const AnalysisData data = simulate(config(100'000)).analysis();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_all(data).ve_ch);
}
BENCHMARK(BM_EstimateAll);

}  // namespace
