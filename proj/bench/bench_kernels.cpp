// Serial reference vs OpenMP kernels. Arg 0 selects serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "hostforge/allocsim.hpp"
#include "hostforge/sampler.hpp"
#include "hostforge/statfit.hpp"

using namespace hostforge;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const std::vector<HostSpec>& population() {
  static const auto pop = generate_population(default_params(), YearTime(2010.67), 100'000, 1);
  return pop;
}

void BM_GeneratePopulation(benchmark::State& state) {
  const auto params = default_params();
  const GenerateOptions opt{.execution = mode(state)};
  for (auto _ : state) {
    auto pop = generate_population(params, YearTime(2010.67), static_cast<std::size_t>(state.range(1)), 7, opt);
    benchmark::DoNotOptimize(pop.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_GeneratePopulation)->ArgsProduct({{0, 1}, {10'000, 100'000}})->Unit(benchmark::kMillisecond);

void BM_UtilityMatrix(benchmark::State& state) {
  const auto apps = default_app_profiles();
  const auto& pop = population();
  for (auto _ : state) {
    auto m = utility_matrix(apps, pop, mode(state));
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pop.size() * apps.size()));
}
BENCHMARK(BM_UtilityMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CorrelationMatrix(benchmark::State& state) {
  const auto cols = columns_of(population());
  for (auto _ : state) {
    auto r = correlation_matrix(cols, mode(state));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_CorrelationMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SubsampledKs(benchmark::State& state) {
  const auto& disk = columns_of(population()).columns[5];
  const DistFamily fit = mle_fit(DistFamilyTag::lognormal, disk);
  KsOptions opt;
  opt.rounds = 1000;
  opt.seed = 3;
  opt.execution = mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subsampled_ks(disk, [&](double x) { return fit.cdf(x); }, opt));
  }
}
BENCHMARK(BM_SubsampledKs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
