#include "spatialcv/serialization.hpp"

#include <fstream>
#include <sstream>

#include "spatialcv/error.hpp"

namespace spcv {

namespace {

void check_schema(const Json& j, const std::string& what) {
  if (!j.is_object()) throw DataError(what + ": expected a JSON object");
  const int v = j.value("schema_version", 0);
  if (v != kSchemaVersion)
    throw DataError(what + ": unsupported schema_version " + std::to_string(v));
}

Json params_json(const RFParams& p) {
  Json j;
  j["num_trees"] = p.num_trees;
  j["mtry"] = p.mtry;
  j["min_node_size"] = p.min_node_size;
  j["seed"] = p.seed;
  j["permutation_importance"] = p.permutation_importance;
  return j;
}

RFParams params_from(const Json& j) {
  RFParams p;
  p.num_trees = j.at("num_trees").get<std::size_t>();
  p.mtry = j.at("mtry").get<std::size_t>();
  p.min_node_size = j.at("min_node_size").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.permutation_importance = j.at("permutation_importance").get<bool>();
  return p;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const FoldAssignment& folds) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = folds.diagnostics.method;
  j["k"] = folds.k;
  j["seed"] = folds.diagnostics.seed;
  j["W"] = optional_number(folds.diagnostics.W);
  j["fold_of"] = folds.fold_of;
  j["index_train"] = folds.index_train;
  return j;
}

Json to_json(const NNDMExclusion& nndm, std::optional<double> W) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = "nndm";
  j["n"] = nndm.n;
  j["W"] = optional_number(W);
  j["exclude"] = nndm.exclude;
  return j;
}

Json to_json(const CvScheme& scheme) {
  return std::visit([](const auto& s) { return to_json(s); }, scheme);
}

CvScheme scheme_from_json(const Json& j) {
  check_schema(j, "folds");
  if (j.contains("exclude")) {
    NNDMExclusion e;
    e.exclude = j.at("exclude").get<std::vector<std::vector<std::size_t>>>();
    e.n = j.value("n", e.exclude.size());
    e.validate();
    return e;
  }
  FoldAssignment f;
  f.k = j.at("k").get<std::size_t>();
  f.fold_of = j.at("fold_of").get<std::vector<std::size_t>>();
  f.n = f.fold_of.size();
  f.index_train = j.at("index_train").get<std::vector<std::vector<std::size_t>>>();
  f.diagnostics.method = j.value("method", std::string());
  f.diagnostics.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("W") && !j.at("W").is_null()) f.diagnostics.W = j.at("W").get<double>();
  f.validate();
  return f;
}

Json to_json(const FittedModel& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(model.kind());
  j["predictors"] = model.names;
  j["importance"] = model.importance;
  j["rf"] = params_json(model.spec.rf);
  j["knn_k"] = model.spec.knn_k;
  j["knn_standardize"] = model.spec.knn_standardize;
  if (const auto* rf = std::get_if<RandomForest>(&model.impl)) {
    Json trees = Json::array();
    for (const auto& t : rf->trees()) {
      Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
           value = Json::array();
      for (const auto& nd : t.nodes) {
        feature.push_back(nd.feature);
        threshold.push_back(nd.threshold);
        left.push_back(nd.left);
        right.push_back(nd.right);
        value.push_back(nd.value);
      }
      trees.push_back(Json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
                           {"value", value}});
    }
    j["forest"] = {{"num_features", rf->num_features()}, {"importance", rf->importance()}, {"trees", trees}};
  } else {
    const auto& knn = std::get<KnnRegressor>(model.impl);
    const Matrix& x = knn.raw_rows();
    Json rows = Json::array();
    for (std::size_t r = 0; r < x.rows(); ++r) rows.push_back(std::vector<double>(x.row(r).begin(), x.row(r).end()));
    j["knn"] = {{"rows", rows}, {"response", knn.response()}};
  }
  return j;
}

FittedModel model_from_json(const Json& j) {
  check_schema(j, "model");
  ModelSpec spec;
  spec.kind = parse_model_kind(j.at("kind").get<std::string>());
  spec.rf = params_from(j.at("rf"));
  spec.knn_k = j.at("knn_k").get<std::size_t>();
  spec.knn_standardize = j.at("knn_standardize").get<bool>();
  auto names = j.at("predictors").get<std::vector<std::string>>();
  auto importance = j.at("importance").get<std::vector<double>>();
  if (spec.kind == ModelKind::rf) {
    const Json& f = j.at("forest");
    std::vector<RegressionTree> trees;
    for (const auto& t : f.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<std::uint32_t>>();
      const auto right = t.at("right").get<std::vector<std::uint32_t>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t m = feature.size();
      if (threshold.size() != m || left.size() != m || right.size() != m || value.size() != m)
        throw DataError("model: tree arrays differ in length");
      RegressionTree tree;
      for (std::size_t i = 0; i < m; ++i) tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
      trees.push_back(std::move(tree));
    }
    auto rf = RandomForest::from_parts(std::move(trees), f.at("importance").get<std::vector<double>>(),
                                       f.at("num_features").get<std::size_t>());
    if (rf.num_features() != names.size()) throw DataError("model: predictor count differs from the forest");
    return FittedModel{spec, std::move(names), std::move(importance), std::move(rf)};
  }
  const Json& k = j.at("knn");
  const auto rows = k.at("rows").get<std::vector<std::vector<double>>>();
  Matrix x(rows.size(), names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != names.size()) throw DataError("model: knn row has the wrong width");
    std::copy(rows[r].begin(), rows[r].end(), x.row(r).begin());
  }
  KnnRegressor knn(x, k.at("response").get<std::vector<double>>(), spec.knn_k, spec.knn_standardize);
  return FittedModel{spec, std::move(names), std::move(importance), std::move(knn)};
}

Json to_json(const TrainDI& t) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["predictors"] = t.names;
  j["means"] = t.means;
  j["sds"] = t.sds;
  j["weights"] = t.weights;
  j["dropped"] = t.dropped;
  j["metric"] = to_string(t.metric);
  j["cholesky"] = t.cholesky;
  j["d_bar"] = t.d_bar;
  j["threshold"] = t.threshold;
  j["k"] = t.k;
  j["fold_of"] = t.fold_of;
  j["train_di"] = t.train_di;
  return j;
}

TrainDI train_di_from_json(const Json& j) {
  check_schema(j, "trainDI");
  TrainDI t;
  t.names = j.at("predictors").get<std::vector<std::string>>();
  t.means = j.at("means").get<std::vector<double>>();
  t.sds = j.at("sds").get<std::vector<double>>();
  t.weights = j.at("weights").get<std::vector<double>>();
  t.dropped = j.at("dropped").get<std::vector<std::string>>();
  t.metric = parse_metric(j.at("metric").get<std::string>());
  t.cholesky = j.at("cholesky").get<std::vector<double>>();
  t.d_bar = j.at("d_bar").get<double>();
  t.threshold = j.at("threshold").get<double>();
  t.k = j.at("k").get<std::size_t>();
  t.fold_of = j.at("fold_of").get<std::vector<std::size_t>>();
  t.train_di = j.at("train_di").get<std::vector<double>>();
  t.validate();
  return t;
}

Json to_json(const ErrorProfile& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(p.kind);
  j["window"] = p.window;
  j["valid_range"] = {p.valid_min, p.valid_max};
  Json windows = Json::array();
  for (const auto& w : p.windows) windows.push_back(Json{{"center", w.center}, {"rmse", w.rmse}, {"size", w.size}});
  j["window_stats"] = windows;
  j["breakpoints"] = {{"x", p.knots_x}, {"y", p.knots_y}};
  return j;
}

ErrorProfile profile_from_json(const Json& j) {
  check_schema(j, "error profile");
  ErrorProfile p;
  p.kind = parse_profile_kind(j.at("kind").get<std::string>());
  p.window = j.at("window").get<std::size_t>();
  p.valid_min = j.at("valid_range").at(0).get<double>();
  p.valid_max = j.at("valid_range").at(1).get<double>();
  for (const auto& w : j.at("window_stats"))
    p.windows.push_back({w.at("center").get<double>(), w.at("rmse").get<double>(), w.at("size").get<std::size_t>()});
  p.knots_x = j.at("breakpoints").at("x").get<std::vector<double>>();
  p.knots_y = j.at("breakpoints").at("y").get<std::vector<double>>();
  p.validate();
  return p;
}

Json to_json(const Metrics& m) {
  Json j;
  j["RMSE"] = m.rmse;
  j["MAE"] = m.mae;
  j["Rsquared"] = optional_number(m.r2);
  j["Rsquared_sse"] = optional_number(m.r2_sse);
  j["n"] = m.n;
  return j;
}

Json to_json(const SelectionPath& path) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["final_set"] = path.final_set;
  Json steps = Json::array();
  for (const auto& s : path.steps)
    steps.push_back(Json{{"added", s.added}, {"set", s.set}, {"RMSE", s.rmse}, {"Rsquared", optional_number(s.r2)}});
  j["steps"] = steps;
  j["evaluations"] = path.evaluations.size();
  j["final_cv"] = to_json(path.final_cv.metrics);
  if (path.tuned) j["tuned"] = params_json(*path.tuned);
  return j;
}

Json to_json(const DistanceDistributions& d) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["space"] = d.space == DistanceSpace::geographic ? "geographic" : "feature";
  Json groups = Json::array();
  for (const auto& g : d.groups) groups.push_back(Json{{"name", g.name}, {"values", g.values}});
  j["groups"] = groups;
  return j;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace spcv
