#include <doctest.h>

#include <algorithm>

#include "spatialcv/error.hpp"
#include "spatialcv/ffs.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/rng.hpp"

using namespace spcv;

namespace {

Dataset seven(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.X = Matrix(n, 7);
  for (auto& v : d.X.data()) v = rng.uniform();
  d.names = {"n1", "x1", "n2", "n3", "x2", "n4", "n5"};
  for (std::size_t i = 0; i < n; ++i) d.y.push_back(4.0 * d.X(i, 1) + 3.0 * std::sin(5.0 * d.X(i, 4)) + 0.1 * rng.normal());
  return d;
}

ModelSpec small_rf() {
  ModelSpec s;
  s.rf.num_trees = 25;
  s.rf.seed = 3;
  return s;
}

std::size_t choose2(std::size_t p) { return p * (p - 1) / 2; }

}  // namespace

TEST_SUITE("ffs") {
  TEST_CASE("two predictors give a single step") {
    Dataset d = seven(60, 1).select_columns({"x1", "x2"});
    const auto path = ffs(d, small_rf(), random_kfold(60, 5, 1));
    CHECK(path.steps.size() == 1);
    CHECK(path.evaluations.size() == 1);
    CHECK(path.final_set == std::vector<std::string>{"x1", "x2"});
  }

  TEST_CASE("fewer than two predictors is an error") {
    Dataset d = seven(30, 1).select_columns({"x1"});
    CHECK_THROWS_AS(ffs(d, small_rf(), random_kfold(30, 5, 1)), PreconditionError);
  }

  TEST_CASE("selection recovers the informative predictors") {
    const Dataset d = seven(150, 2);
    const auto folds = random_kfold(150, 5, 4);
    const auto path = ffs(d, small_rf(), folds);
    CHECK(std::find(path.final_set.begin(), path.final_set.end(), "x1") != path.final_set.end());
    CHECK(std::find(path.final_set.begin(), path.final_set.end(), "x2") != path.final_set.end());
    CHECK(path.final_set == path.steps.back().set);
    for (std::size_t s = 1; s < path.steps.size(); ++s) CHECK(path.steps[s].rmse < path.steps[s - 1].rmse);

    // Evaluation count: all pairs, then (p - |set|) per round.
    std::size_t expected = choose2(7);
    for (std::size_t s = 0; s < path.steps.size(); ++s) {
      const std::size_t size = path.steps[s].set.size();
      if (size < 7) expected += 7 - size;
    }
    CHECK(path.evaluations.size() == expected);

    double best_pair = std::numeric_limits<double>::infinity();
    for (const auto& e : path.evaluations)
      if (e.round == 0) best_pair = std::min(best_pair, e.metrics.rmse);
    CHECK(path.steps.back().rmse <= best_pair);
    CHECK(path.steps.front().rmse == best_pair);
  }

  TEST_CASE("selection is reproducible and independent of column order") {
    const Dataset d = seven(100, 5);
    const auto folds = random_kfold(100, 5, 6);
    ModelSpec spec = small_rf();
    spec.kind = ModelKind::knn;
    const auto a = ffs(d, spec, folds);
    const auto b = ffs(d, spec, folds);
    CHECK(a.final_set == b.final_set);
    CHECK(a.final_cv.metrics.rmse == b.final_cv.metrics.rmse);
    const Dataset shuffled = d.select_columns({"x2", "n5", "n1", "n4", "x1", "n3", "n2"});
    const auto c = ffs(shuffled, spec, folds);
    CHECK(c.final_set == a.final_set);
    CHECK(c.final_cv.metrics.rmse == a.final_cv.metrics.rmse);
  }

  TEST_CASE("selection log") {
    const Dataset d = seven(60, 7).select_columns({"x1", "x2", "n1"});
    const auto path = ffs(d, small_rf(), random_kfold(60, 5, 1));
    const std::string log = selection_log_csv(path);
    CHECK(log.rfind("step,action,candidate_set,RMSE,R2\n", 0) == 0);
    CHECK(log.find("evaluate,n1+x1") != std::string::npos);
    CHECK(log.find("accept,") != std::string::npos);
    CHECK(plot_selection(path).find("<svg") != std::string::npos);
  }
}
