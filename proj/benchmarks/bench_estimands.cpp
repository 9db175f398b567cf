#include <benchmark/benchmark.h>

#include "vetk/estimands.hpp"

using namespace vetk;

namespace {

Scenario weibull_pair() {
  return Scenario(SurvivalModel::weibull(1.6, 40.0), SurvivalModel::weibull(0.9, 70.0), 60.0);
}

void BM_VeCox(benchmark::State& state) {
  const Scenario s = weibull_pair();
  for (auto _ : state) benchmark::DoNotOptimize(ve_cox(s, 60.0));
}
BENCHMARK(BM_VeCox);

void BM_SolveCoxWithScan(benchmark::State& state) {
  const Scenario s = weibull_pair();
  for (auto _ : state) benchmark::DoNotOptimize(solve_cox(s, 60.0).theta);
}
BENCHMARK(BM_SolveCoxWithScan);

void BM_RestrictedMean(benchmark::State& state) {
  const auto m = SurvivalModel::piecewise_hazard(
      {{0.0, 28.0, LinearHazard{0.0005, 0.0}}, {28.0, kInfinity, LocalWeibullHazard{1.3, 400.0}}});
  for (auto _ : state) benchmark::DoNotOptimize(m.restricted_mean(150.0));
}
BENCHMARK(BM_RestrictedMean);

void BM_EstimandReport(benchmark::State& state) {
  const Scenario s = weibull_pair();
  for (auto _ : state) benchmark::DoNotOptimize(estimand_report(s).ve_ir);
}
BENCHMARK(BM_EstimandReport);

}  // namespace
