#include <benchmark/benchmark.h>

#include "spatialcv/geom.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/rng.hpp"

namespace {

spcv::PointSet points(std::size_t n, std::uint64_t seed) {
  spcv::Rng rng(seed);
  spcv::PointSet p;
  for (std::size_t i = 0; i < n; ++i) p.coords.push_back({rng.uniform(0, 1000), rng.uniform(0, 1000)});
  return p;
}

void BM_NndWithin(benchmark::State& state) {
  const auto p = points(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spcv::nnd_within(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NndWithin)->RangeMultiplier(10)->Range(100, 100000);

void BM_NndBetweenGeographic(benchmark::State& state) {
  spcv::Rng rng(2);
  spcv::PointSet a, b;
  a.crs = b.crs = spcv::CrsKind::geographic;
  for (int i = 0; i < state.range(0); ++i) a.coords.push_back({rng.uniform(-180, 180), rng.uniform(-60, 60)});
  for (int i = 0; i < 10000; ++i) b.coords.push_back({rng.uniform(-180, 180), rng.uniform(-60, 60)});
  for (auto _ : state) benchmark::DoNotOptimize(spcv::nnd_between(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NndBetweenGeographic)->Arg(1000)->Arg(10000);

void BM_FeatureNearest(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  spcv::Rng rng(3);
  spcv::Matrix ref(20000, dim), q(1000, dim);
  for (auto& v : ref.data()) v = rng.normal();
  for (auto& v : q.data()) v = rng.normal();
  const spcv::NnIndex index(ref);
  for (auto _ : state)
    for (std::size_t r = 0; r < q.rows(); ++r)
      benchmark::DoNotOptimize(index.nearest(q.row(r), [](std::size_t) { return true; }));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_FeatureNearest)->Arg(2)->Arg(6)->Arg(12);

}  // namespace
