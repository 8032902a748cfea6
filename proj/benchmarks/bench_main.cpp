#include <benchmark/benchmark.h>

#include "l2disc/bounds.hpp"
#include "l2disc/census.hpp"
#include "l2disc/discrepancy.hpp"
#include "l2disc/haar.hpp"
#include "l2disc/pointset.hpp"

namespace {

void BM_L2Squared(benchmark::State& state) {
  const auto set = l2disc::random_uniform(static_cast<std::size_t>(state.range(0)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(l2disc::l2_squared(set));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_L2Squared)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oNSquared);

void BM_L2SquaredExact(benchmark::State& state) {
  const auto set = l2disc::hammersley(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(l2disc::l2_squared_exact(set));
}
BENCHMARK(BM_L2SquaredExact)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Parseval(benchmark::State& state) {
  const auto set = l2disc::hammersley(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l2disc::parseval_partial(set, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_Parseval)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_LevelCensus(benchmark::State& state) {
  const auto set = l2disc::random_uniform(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(l2disc::level_census(set, 10));
}
BENCHMARK(BM_LevelCensus)->RangeMultiplier(4)->Range(256, 16384);

void BM_MasterRhs(benchmark::State& state) {
  const auto set = l2disc::random_uniform(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(l2disc::master_rhs(set));
}
BENCHMARK(BM_MasterRhs)->RangeMultiplier(4)->Range(256, 16384);

void BM_TheoremConstants(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(l2disc::theorem_constants());
}
BENCHMARK(BM_TheoremConstants)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
