#include <doctest.h>

#include <filesystem>
#include <set>

#include "oracles.hpp"
#include "spatialcv/error.hpp"
#include "spatialcv/error_profile.hpp"
#include "spatialcv/ffs.hpp"
#include "spatialcv/serialization.hpp"
#include "spatialcv/svg.hpp"
#include "spatialcv/synthetic.hpp"

using namespace spcv;

namespace {

SyntheticScenario small_scenario(std::uint64_t seed) {
  SyntheticScenario s;
  s.ncols = 30;
  s.nrows = 20;
  s.samples = 60;
  s.informative = 2;
  s.noise = 2;
  s.design = SamplingDesign::clustered;
  s.clusters = 6;
  s.cluster_radius = 4;
  s.seed = seed;
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("spcv_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("synthetic data is deterministic per seed") {
    const auto a = generate_synthetic(small_scenario(7));
    const auto b = generate_synthetic(small_scenario(7));
    const auto c = generate_synthetic(small_scenario(8));
    CHECK(format_training_csv(a.training) == format_training_csv(b.training));
    CHECK(a.truth.values == b.truth.values);
    CHECK(a.informative_names == b.informative_names);
    CHECK(format_training_csv(a.training) != format_training_csv(c.training));
    CHECK(a.predictors.bands.size() == 4);
    CHECK(a.training.data.rows() == 60);
    CHECK(std::set<std::size_t>(a.sample_cells.begin(), a.sample_cells.end()).size() == 60);
    for (const auto& band : a.predictors.bands) {
      CHECK(mean(band.values) == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
      CHECK(sample_sd(band.values) == doctest::Approx(1.0).epsilon(0.01));
    }
  }

  TEST_CASE("extracting at sample points reproduces the training table") {
    const auto s = generate_synthetic(small_scenario(3));
    const auto ex = extract_at_points(s.predictors, *s.training.data.points, s.training.data.names);
    CHECK(ex.kept.size() == 60);
    CHECK(ex.X == s.training.data.X);
    CHECK(ex.cells == s.sample_cells);
    const auto rt = parse_training_csv(format_training_csv(s.training));
    CHECK(rt.data.X == s.training.data.X);
    CHECK(rt.data.y == s.training.data.y);
    CHECK(rt.data.names == s.training.data.names);
  }

  TEST_CASE("scenario JSON round trip") {
    const auto s = small_scenario(11);
    const auto r = parse_scenario(scenario_json(s));
    CHECK(scenario_json(r) == scenario_json(s));
    CHECK(r.design == SamplingDesign::clustered);
    CHECK_THROWS(parse_scenario("{\"samples\": -1}"));
  }

  TEST_CASE("model serialization preserves predictions") {
    const auto s = generate_synthetic(small_scenario(5));
    const Dataset& d = s.training.data;
    RFParams p;
    p.num_trees = 20;
    p.seed = 4;
    const FittedModel rf = fit_rf(d, p);
    const FittedModel rf2 = model_from_json(Json::parse(to_json(rf).dump()));
    CHECK(rf2.predict_aligned(d.X) == rf.predict_aligned(d.X));
    CHECK(rf2.importance == rf.importance);
    CHECK(rf2.names == rf.names);
    const FittedModel kn = fit_knn(d, 4);
    const FittedModel kn2 = model_from_json(Json::parse(to_json(kn).dump()));
    CHECK(kn2.predict_aligned(d.X) == kn.predict_aligned(d.X));
  }

  TEST_CASE("folds, trainDI and profile round trips") {
    const auto s = generate_synthetic(small_scenario(6));
    const Dataset& d = s.training.data;
    const auto folds = random_kfold(d.rows(), 5, 2);
    const auto f2 = std::get<FoldAssignment>(scheme_from_json(Json::parse(to_json(folds).dump())));
    CHECK(f2.fold_of == folds.fold_of);
    CHECK(f2.k == folds.k);
    NNDMExclusion ex;
    ex.n = 3;
    ex.exclude = {{0, 1}, {1}, {0, 2}};
    const auto ex2 = std::get<NNDMExclusion>(scheme_from_json(to_json(ex)));
    CHECK(ex2.exclude == ex.exclude);

    FittedModel m = fit_knn(d, 3);
    m.importance.assign(d.cols(), 1.0);
    const TrainDI t = train_di(d, m, folds);
    const TrainDI t2 = train_di_from_json(Json::parse(to_json(t).dump()));
    CHECK(t2.train_di == t.train_di);
    CHECK(t2.threshold == t.threshold);
    CHECK(t2.d_bar == t.d_bar);
    CHECK(t2.transform(d.X) == t.transform(d.X));

    std::vector<PooledPrediction> pooled;
    for (std::size_t i = 0; i < d.rows(); ++i) pooled.push_back({i, folds.fold_of[i], d.y[i], d.y[i] + 0.1 * (i % 7)});
    const auto prof = error_profile(pooled, t.train_di, 10);
    const auto prof2 = profile_from_json(Json::parse(to_json(prof).dump()));
    CHECK(prof2.knots_x == prof.knots_x);
    CHECK(prof2.knots_y == prof.knots_y);
    CHECK(prof2(0.3) == prof(0.3));
  }

  TEST_CASE("files and plots are byte-stable") {
    const auto dir = temp_dir("files");
    const auto s = generate_synthetic(small_scenario(9));
    write_raster_stack(s.predictors, dir / "a" / "manifest.json");
    write_raster_stack(s.predictors, dir / "b" / "manifest.json");
    const auto back = read_raster_stack(dir / "a" / "manifest.json");
    CHECK(back.names() == s.predictors.names());
    for (std::size_t b = 0; b < back.bands.size(); ++b) CHECK(back.bands[b].values == s.predictors.bands[b].values);
    CHECK(render_grid(s.truth) == render_grid(s.truth));
    Grid mask(s.truth.geometry, 1.0);
    mask.values[0] = 0.0;
    CHECK(render_grid(s.truth, Palette::magma, &mask, "t") != render_grid(s.truth, Palette::magma, nullptr, "t"));
    write_json(to_json(random_kfold(10, 2, 1)), dir / "f.json");
    CHECK(read_json(dir / "f.json")["k"] == 2);
    CHECK_THROWS(read_json(dir / "missing.json"));
    std::filesystem::remove_all(dir);
  }
}
