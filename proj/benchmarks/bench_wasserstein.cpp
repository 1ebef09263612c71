#include <benchmark/benchmark.h>

#include <cmath>

#include "spatialcv/ecdf.hpp"
#include "spatialcv/rng.hpp"

namespace {

void BM_Wasserstein(benchmark::State& state) {
  spcv::Rng rng(4);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& v : a) v = std::abs(rng.normal());
  for (auto& v : b) v = 0.5 + std::abs(rng.normal());
  const spcv::Ecdf fa(a), fb(b);
  for (auto _ : state) benchmark::DoNotOptimize(spcv::wasserstein1(fa, fb));
}
BENCHMARK(BM_Wasserstein)->RangeMultiplier(10)->Range(100, 1000000);

}  // namespace
