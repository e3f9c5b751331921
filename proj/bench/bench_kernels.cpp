// Serial reference paths against the optimized and OpenMP paths.
//
//   pcit_bench --benchmark_filter=Null

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "pcit/io.hpp"
#include "pcit/permutation.hpp"
#include "pcit/statistics.hpp"
#include "pcit/transform.hpp"

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

void BM_BruteForce(benchmark::State& state) {
  const auto kind = static_cast<pcit::StatisticKind>(state.range(0));
  const auto us = normals(8, 1), vs = normals(8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pcit::reference_statistic(kind, us, vs));
  state.SetLabel(pcit::to_string(kind));
}

void BM_Optimized(benchmark::State& state) {
  const auto kind = static_cast<pcit::StatisticKind>(state.range(0));
  const auto us = normals(8, 1), vs = normals(8, 2);
  const auto spec = pcit::StatisticSpec::of(kind);
  for (auto _ : state) benchmark::DoNotOptimize(pcit::evaluate(spec, us, vs).value);
  state.SetLabel(pcit::to_string(kind));
}

void digoxin_null(benchmark::State& state, pcit::Execution execution) {
  const auto kind = static_cast<pcit::StatisticKind>(state.range(0));
  const auto d = pcit::digoxin_dataset();
  const auto pseudo = pcit::partial_copula_transform(d, pcit::EstimatorConfig::silverman(d.xs()));
  const auto stat = pcit::make_paired_statistic(pcit::StatisticSpec::of(kind), pseudo.u, pseudo.v);
  pcit::PermutationOptions options;
  options.resamples = 10'000;
  options.execution = execution;
  for (auto _ : state) benchmark::DoNotOptimize(pcit::permutation_null(*stat, options).values);
  state.SetItemsProcessed(state.iterations() * options.resamples);
  state.SetLabel(pcit::to_string(kind) + " threads=" +
                 std::to_string(execution == pcit::Execution::serial ? 1 : omp_get_max_threads()));
}

void BM_NullSerial(benchmark::State& state) { digoxin_null(state, pcit::Execution::serial); }
void BM_NullParallel(benchmark::State& state) { digoxin_null(state, pcit::Execution::parallel); }

constexpr int kKinds = 5;

}  // namespace

BENCHMARK(BM_BruteForce)->DenseRange(0, kKinds - 1);
BENCHMARK(BM_Optimized)->DenseRange(0, kKinds - 1);
BENCHMARK(BM_NullSerial)->DenseRange(0, kKinds - 1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NullParallel)->DenseRange(0, kKinds - 1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
