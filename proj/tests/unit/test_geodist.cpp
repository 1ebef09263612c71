#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "spatialcv/ecdf.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/geodist.hpp"

using namespace spcv;

namespace {

RasterStack grid_stack(std::size_t nc, std::size_t nr) {
  RasterStack s;
  s.geometry.ncols = nc;
  s.geometry.nrows = nr;
  s.bands.push_back({"a", std::vector<double>(nc * nr, 1.0)});
  return s;
}

}  // namespace

TEST_SUITE("geodist") {
  TEST_CASE("prediction point sampling") {
    const auto s = grid_stack(2, 2);
    const auto all = sample_prediction_points(s, 4, 1);
    std::set<std::pair<double, double>> centers;
    for (const auto& p : all.points.coords) centers.insert({p.x, p.y});
    CHECK(centers == std::set<std::pair<double, double>>{{0.5, 0.5}, {1.5, 0.5}, {0.5, 1.5}, {1.5, 1.5}});
    CHECK(sample_prediction_points(s, 100, 1).points.size() == 4);

    auto big = grid_stack(50, 40);
    big.bands[0].values[7] = kNoData;
    const auto a = sample_prediction_points(big, 300, 9);
    const auto b = sample_prediction_points(big, 300, 9);
    CHECK(a.points.coords == b.points.coords);
    CHECK(std::set<std::size_t>(a.cells.begin(), a.cells.end()).size() == 300);
    CHECK(std::find(a.cells.begin(), a.cells.end(), 7) == a.cells.end());

    auto empty = grid_stack(2, 2);
    for (auto& v : empty.bands[0].values) v = kNoData;
    CHECK_THROWS(sample_prediction_points(empty, 3, 1));
  }

  TEST_CASE("groups follow their definitions") {
    Rng rng(1);
    const auto train = oracle::clustered_points(rng, 80, 4, 3.0);
    const auto domain = oracle::random_points(rng, 300);
    const auto test = oracle::random_points(rng, 20);
    const CvScheme folds = random_kfold(train.size(), 5, 3);
    const auto d = geodist(train, domain, &folds, &test);
    CHECK(*d.find(kSampleToSample) == oracle::nnd_within(train));
    CHECK(*d.find(kPredictionToSample) == oracle::nnd_between(domain, train));
    CHECK(*d.find(kTestToSample) == oracle::nnd_between(test, train));
    const auto& fo = std::get<FoldAssignment>(folds);
    const auto& cv = *d.find(kCvDistances);
    const auto& s2s = *d.find(kSampleToSample);
    for (std::size_t i = 0; i < train.size(); ++i) {
      double want = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < train.size(); ++j)
        if (fo.fold_of[j] != fo.fold_of[i]) want = std::min(want, distance(train.coords[i], train.coords[j], train.crs));
      CHECK(cv[i] == want);
      CHECK(cv[i] >= s2s[i]);
    }
    // Clustered samples: prediction distances are stochastically larger.
    CHECK(wasserstein1(ecdf_of(*d.find(kPredictionToSample)), ecdf_of(s2s)) > 1.0);
  }

  TEST_CASE("LOO folds give CV distances equal to sample-to-sample") {
    Rng rng(2);
    const auto train = oracle::random_points(rng, 40);
    const CvScheme loo = random_kfold(40, 40, 1);
    const auto d = geodist(train, train, &loo);
    CHECK(*d.find(kCvDistances) == *d.find(kSampleToSample));
    for (double v : *d.find(kPredictionToSample)) CHECK(v == 0.0);
  }

  TEST_CASE("feature space standardizes with training statistics") {
    Rng rng(3);
    Matrix x = oracle::random_matrix(rng, 50, 3);
    for (std::size_t r = 0; r < x.rows(); ++r) x(r, 2) = 1000.0 * x(r, 2) + 5.0;
    const auto d = geodist_features(x, x);
    for (double v : *d.find(kPredictionToSample)) CHECK(v == 0.0);
    CHECK(d.space == DistanceSpace::feature);
    Matrix scaled = x;
    for (std::size_t r = 0; r < x.rows(); ++r) scaled(r, 0) = 7.0 * x(r, 0) - 3.0;
    const auto e = geodist_features(scaled, scaled);
    const auto& a = *d.find(kSampleToSample);
    const auto& b = *e.find(kSampleToSample);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
  }

  TEST_CASE("plots are deterministic") {
    DistanceDistributions d;
    d.groups = {{kSampleToSample, {1, 1, 1}}, {kPredictionToSample, {1, 2, 3}}};
    const auto e1 = plot_distributions(d, PlotStat::ecdf);
    CHECK(e1 == plot_distributions(d, PlotStat::ecdf));
    CHECK(e1.find("<svg") != std::string::npos);
    const auto h = plot_distributions(d, PlotStat::density);
    CHECK(h != e1);
  }
}
