#include <benchmark/benchmark.h>

#include "spatialcv/aoa.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/model.hpp"
#include "spatialcv/synthetic.hpp"

namespace {

const spcv::SyntheticData& data() {
  static const spcv::SyntheticData syn = [] {
    spcv::SyntheticScenario s;
    s.samples = 500;
    s.seed = 6;
    return spcv::generate_synthetic(s);
  }();
  return syn;
}

void BM_RandomForestFit(benchmark::State& state) {
  spcv::RFParams p;
  p.num_trees = 100;
  p.seed = 6;
  const spcv::Parallel par{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(spcv::fit_rf(data().training.data, p, par));
}
BENCHMARK(BM_RandomForestFit)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PredictRaster(benchmark::State& state) {
  spcv::RFParams p;
  p.num_trees = 100;
  p.seed = 6;
  p.permutation_importance = false;
  const auto model = spcv::fit_rf(data().training.data, p);
  for (auto _ : state) benchmark::DoNotOptimize(spcv::predict_raster(model, data().predictors));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data().predictors.geometry.cells()));
}
BENCHMARK(BM_PredictRaster)->Unit(benchmark::kMillisecond);

void BM_Aoa(benchmark::State& state) {
  const auto& d = data().training.data;
  spcv::FittedModel model = spcv::fit_knn(d, 5);
  model.importance.assign(d.cols(), 1.0);
  const auto t = spcv::train_di(d, model, spcv::random_kfold(d.rows(), 5, 6));
  for (auto _ : state) benchmark::DoNotOptimize(spcv::aoa(data().predictors, t, d, state.range(0) != 0));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data().predictors.geometry.cells()));
}
BENCHMARK(BM_Aoa)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
