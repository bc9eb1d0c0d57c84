#include <benchmark/benchmark.h>

#include "gridlint/analysis.hpp"
#include "gridlint/entropy.hpp"
#include "gridlint/reference.hpp"
#include "support.hpp"

using namespace gridlint;

namespace {

FingerprintGrid grid(int side) {
  testing::Rng rng(1);
  return testing::random_grid(rng, side, side, 6, true);
}

void BM_MaskedCountsBitvector(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)));
  Rect mask{2, 2, g.width() - 1, g.height() - 1};
  for (auto _ : state) benchmark::DoNotOptimize(masked_fingerprint_counts(g, mask));
}

void BM_MaskedCountsNaive(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)));
  Rect mask{2, 2, g.width() - 1, g.height() - 1};
  for (auto _ : state) benchmark::DoNotOptimize(reference::naive_fingerprint_counts(g, mask));
}

void BM_EntropyTreeReference(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::entropy_tree(g, g.extent()));
}

void BM_EntropyTree(benchmark::State& state) {
  auto g = grid(static_cast<int>(state.range(0)));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(entropy_tree(g, g.extent(), jobs));
}

void BM_AnalyzeWorkbook(benchmark::State& state) {
  testing::Rng rng(2);
  Workbook wb = testing::table_workbook(rng, 13, 13, 9, 0.5);
  AnalysisConfig config;
  config.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(wb, config));
}

}  // namespace

BENCHMARK(BM_MaskedCountsBitvector)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_MaskedCountsNaive)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_EntropyTreeReference)->Arg(16)->Arg(48);
BENCHMARK(BM_EntropyTree)->Args({16, 1})->Args({48, 1})->Args({48, 4});
BENCHMARK(BM_AnalyzeWorkbook)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
