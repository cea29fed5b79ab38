// Serial vs OpenMP replicate batches on the per-replicate workload
// (generate an ER graph, bound r(1,1)).
#include <benchmark/benchmark.h>

#include "sspr/batch.hpp"
#include "sspr/pipeline.hpp"

using namespace sspr;

namespace {

double replicate_work(std::size_t r) {
  ErConfig cfg;
  cfg.n = 40;
  cfg.p = 0.15;
  cfg.seed = replicate_seed(1, r);
  const WeightedDigraph g = erdos_renyi(cfg);
  const auto b = assortativity_bounds(g, StrengthType::Out, StrengthType::Out, default_kappa(g));
  return b.hi - b.lo;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_serial<double>(count, replicate_work));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchOpenMP(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto jobs = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates<double>(count, jobs, replicate_work));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchOpenMP)->Args({8, 1})->Args({8, 2})->Args({8, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
