#include <benchmark/benchmark.h>

#include "spatialcv/folds.hpp"
#include "spatialcv/geodist.hpp"
#include "spatialcv/synthetic.hpp"

namespace {

spcv::SyntheticData clustered(std::size_t samples) {
  spcv::SyntheticScenario s;
  s.samples = samples;
  s.design = spcv::SamplingDesign::clustered;
  s.clusters = 10;
  s.cluster_radius = 10;
  s.seed = 5;
  return spcv::generate_synthetic(s);
}

void BM_Knndm(benchmark::State& state) {
  const auto syn = clustered(static_cast<std::size_t>(state.range(0)));
  const auto domain = spcv::sample_prediction_points(syn.predictors, 1000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(spcv::knndm(*syn.training.data.points, domain.points, 5, 5));
}
BENCHMARK(BM_Knndm)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Nndm(benchmark::State& state) {
  const auto syn = clustered(static_cast<std::size_t>(state.range(0)));
  const auto domain = spcv::sample_prediction_points(syn.predictors, 1000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(spcv::nndm(*syn.training.data.points, domain.points));
}
BENCHMARK(BM_Nndm)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
