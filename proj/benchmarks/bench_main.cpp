#include <benchmark/benchmark.h>

#include "qaffine/algebra.hpp"
#include "qaffine/qseries.hpp"

namespace {

void BM_LoadAlgebra(benchmark::State& state) {
  for (auto _ : state) {
    auto g = qaffine::load_algebra("D4~3");
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_LoadAlgebra);

void BM_Qbinomial(benchmark::State& state) {
  const long n = state.range(0);
  for (auto _ : state) {
    auto s = qaffine::qbinomial(n, n / 2, 1);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Qbinomial)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
