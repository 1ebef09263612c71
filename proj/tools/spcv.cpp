#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spatialcv/aoa.hpp"
#include "spatialcv/ecdf.hpp"
#include "spatialcv/error.hpp"
#include "spatialcv/error_profile.hpp"
#include "spatialcv/ffs.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/geodist.hpp"
#include "spatialcv/model.hpp"
#include "spatialcv/raster.hpp"
#include "spatialcv/rng.hpp"
#include "spatialcv/serialization.hpp"
#include "spatialcv/svg.hpp"
#include "spatialcv/synthetic.hpp"
#include "spatialcv/table.hpp"

namespace fs = std::filesystem;
using namespace spcv;

namespace {

struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = ".";

  Parallel par() const { return Parallel{threads}; }
  fs::path dir() const {
    fs::create_directories(out);
    return fs::path(out);
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

Json header(const std::string& command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> opt(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

TrainingTable load_training(const std::string& path, CrsKind crs, const std::string& response) {
  return read_training_csv(path, crs, opt(response));
}

FoldAssignment as_folds(const CvScheme& scheme, const std::string& who) {
  if (const auto* f = std::get_if<FoldAssignment>(&scheme)) return *f;
  throw PreconditionError(who + ": k-fold folds are required (got NNDM exclusion sets)");
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  Common c;
  std::string scenario;
};

int run_synth(const SynthArgs& a, bool seed_given) {
  const std::string text = read_file(a.scenario);
  SyntheticScenario s = parse_scenario(text);
  if (seed_given || !Json::parse(text).contains("seed")) s.seed = a.c.seed;
  const SyntheticData d = generate_synthetic(s);
  const fs::path dir = a.c.dir();
  fs::create_directories(dir / "predictors");
  write_raster_stack(d.predictors, dir / "predictors" / "manifest.json");
  write_training_csv(d.training, dir / "training.csv");
  write_ascii_grid(d.truth, dir / "truth.asc");
  write_text(scenario_json(s), dir / "scenario.json");
  Json j = header("synth");
  j["samples"] = s.samples;
  j["predictors"] = d.predictors.names();
  j["informative"] = d.informative_names;
  j["seed"] = s.seed;
  emit(j);
  return 0;
}

// ---- geodist ---------------------------------------------------------------

struct GeodistArgs {
  Common c;
  std::string train, raster, folds, test, response;
  std::string space = "geographic";
  std::string stat = "ecdf";
  std::size_t domain_size = 1000;
};

int run_geodist(const GeodistArgs& a) {
  const RasterStack stack = read_raster_stack(a.raster);
  const TrainingTable t = load_training(a.train, stack.geometry.crs, a.response);
  const DomainSample domain = sample_prediction_points(stack, a.domain_size, a.c.seed);
  std::optional<CvScheme> scheme;
  if (!a.folds.empty()) scheme = scheme_from_json(read_json(a.folds));
  std::optional<TrainingTable> test;
  if (!a.test.empty()) test = load_training(a.test, stack.geometry.crs, a.response);

  DistanceDistributions d;
  if (a.space == "geographic") {
    d = geodist(*t.data.points, domain.points, scheme ? &*scheme : nullptr, test ? &*test->data.points : nullptr,
                a.c.par());
  } else {
    std::vector<std::string> names;
    for (const auto& nm : t.data.names)
      if (stack.find(nm)) names.push_back(nm);
    require(!names.empty(), "geodist: no training predictor matches a raster band");
    const Matrix train_rows = t.data.select_columns(names).X;
    const Matrix domain_rows = raster_rows(stack, names, domain.cells);
    std::optional<Matrix> test_rows;
    if (test) test_rows = test->data.select_columns(names).X;
    d = geodist_features(train_rows, domain_rows, scheme ? &*scheme : nullptr, test_rows ? &*test_rows : nullptr,
                         a.c.par());
  }
  const fs::path dir = a.c.dir();
  write_json(to_json(d), dir / "geodist.json");
  write_text(plot_distributions(d, parse_plot_stat(a.stat)), dir / "geodist.svg");

  Json j = header("geodist");
  j["space"] = a.space;
  const auto* pred = d.find(kPredictionToSample);
  Json w;
  for (const auto& g : d.groups) {
    if (g.name == kPredictionToSample) continue;
    w[g.name] = wasserstein1(ecdf_of(g.values), ecdf_of(*pred));
  }
  j["W_vs_prediction"] = w;
  emit(j);
  return 0;
}

// ---- folds -----------------------------------------------------------------

struct FoldsArgs {
  Common c;
  std::string method, train, raster, response, space_var, time_var;
  std::size_t k = 5;
  std::size_t domain_size = 1000;
  double min_train = 0.5;
};

std::vector<std::int64_t> labels_of(const TrainingTable& t, const std::string& column) {
  if (column == "t") {
    require(t.data.points && t.data.points->time, "folds: the training table has no 't' column");
    return *t.data.points->time;
  }
  const std::size_t c = t.data.column_index(column);
  std::vector<std::int64_t> out;
  for (std::size_t r = 0; r < t.data.rows(); ++r) {
    const double v = t.data.X(r, c);
    require(v == std::floor(v), "folds: column '" + column + "' must hold integer group labels");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

int run_folds(const FoldsArgs& a) {
  std::optional<RasterStack> stack;
  if (!a.raster.empty()) stack = read_raster_stack(a.raster);
  const CrsKind crs = stack ? stack->geometry.crs : CrsKind::projected;
  const TrainingTable t = load_training(a.train, crs, a.response);
  const PointSet& pts = *t.data.points;
  const std::size_t n = pts.size();

  std::optional<DomainSample> domain;
  if (stack) domain = sample_prediction_points(*stack, a.domain_size, a.c.seed);
  auto need_domain = [&]() -> const PointSet& {
    if (!domain) throw PreconditionError("folds " + a.method + ": --raster is required");
    return domain->points;
  };

  Json j = header("folds");
  j["method"] = a.method;
  CvScheme scheme;
  if (a.method == "random") {
    scheme = random_kfold(n, a.k, derive_seed(a.c.seed, "folds-random"));
  } else if (a.method == "spacetime") {
    std::optional<std::vector<std::int64_t>> sv, tv;
    if (!a.space_var.empty()) sv = labels_of(t, a.space_var);
    if (!a.time_var.empty()) tv = labels_of(t, a.time_var);
    scheme = spacetime_folds(n, sv, tv, a.k, derive_seed(a.c.seed, "folds-spacetime"));
  } else if (a.method == "nndm") {
    scheme = nndm(pts, need_domain(), a.min_train, a.c.par());
  } else {
    const KnndmResult r = knndm_search(pts, need_domain(), a.k, derive_seed(a.c.seed, "folds-knndm"), a.c.par());
    Json ladder = Json::array();
    for (const auto& cand : r.ladder)
      ladder.push_back(Json{{"candidate", cand.label}, {"clusters", cand.clusters}, {"W", cand.W}});
    j["ladder"] = ladder;
    scheme = r.folds;
  }

  std::optional<double> W;
  if (domain) {
    const auto pred = nnd_between(domain->points, pts, a.c.par());
    W = scheme_wasserstein(pts, pred, scheme, a.c.par());
  }
  Json doc;
  if (auto* f = std::get_if<FoldAssignment>(&scheme)) {
    if (W) f->diagnostics.W = W;
    doc = to_json(*f);
    j["k"] = f->k;
  } else {
    doc = to_json(std::get<NNDMExclusion>(scheme), W);
  }
  write_json(doc, a.c.dir() / "folds.json");
  j["n"] = n;
  j["W"] = W ? Json(*W) : Json(nullptr);
  emit(j);
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  Common c;
  std::string train, folds, response;
  std::string crs = "projected";
  std::string model = "rf";
  std::string mtry = "auto";
  std::size_t num_trees = 100;
  std::size_t min_node_size = 5;
  std::size_t knn_k = 5;
  bool ffs = false;
  bool compare_random = false;
};

std::string pooled_csv(const CVResult& cv) {
  std::string out = "row,fold,observed,predicted\n";
  for (const auto& p : cv.pooled)
    out += std::to_string(p.row) + "," + std::to_string(p.fold) + "," + format_double(p.observed) + "," +
           format_double(p.predicted) + "\n";
  return out;
}

int run_train(const TrainArgs& a) {
  const TrainingTable t = load_training(a.train, parse_crs(a.crs), a.response);
  const CvScheme scheme = scheme_from_json(read_json(a.folds));
  require(scheme_size(scheme) == t.data.rows(), "train: folds cover " + std::to_string(scheme_size(scheme)) +
                                                    " rows but the table has " + std::to_string(t.data.rows()));
  ModelSpec spec;
  spec.kind = parse_model_kind(a.model);
  spec.rf.num_trees = a.num_trees;
  spec.rf.min_node_size = a.min_node_size;
  spec.rf.seed = derive_seed(a.c.seed, "train-rf");
  spec.knn_k = a.knn_k;
  const bool auto_mtry = a.mtry == "auto";
  if (!auto_mtry) {
    try {
      spec.rf.mtry = std::stoul(a.mtry);
    } catch (const std::exception&) {
      throw PreconditionError("train: --mtry must be 'auto' or a positive integer");
    }
    require(spec.rf.mtry >= 1, "train: --mtry must be at least 1");
  }

  const fs::path dir = a.c.dir();
  Json j = header("train");
  j["model"] = a.model;
  j["folds_method"] = std::visit(
      [](const auto& s) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FoldAssignment>)
          return s.diagnostics.method;
        else
          return "nndm";
      },
      scheme);

  std::optional<FittedModel> model;
  CVResult cv;
  if (a.ffs) {
    FfsOptions options;
    options.retune_final = auto_mtry;
    const SelectionPath path = ffs(t.data, spec, scheme, options, a.c.par());
    write_text(selection_log_csv(path), dir / "selection_log.csv");
    write_text(plot_selection(path), dir / "selection.svg");
    j["ffs"] = to_json(path);
    model = path.final_model;
    cv = path.final_cv;
  } else if (spec.kind == ModelKind::rf && auto_mtry) {
    const TuneResult tr = tune(t.data, scheme, default_tuning_grid(t.data.cols(), spec.rf), a.c.par());
    Json table = Json::array();
    for (const auto& row : tr.table) table.push_back(Json{{"mtry", row.params.mtry}, {"cv", to_json(row.metrics)}});
    j["tuning"] = table;
    model = tr.final_model;
    cv = tr.best_cv;
  } else {
    cv = cross_validate(t.data, spec, scheme, a.c.par());
    model = fit_model(t.data, spec, a.c.par());
  }
  j["predictors"] = model->names;
  j["mtry"] = model->spec.rf.resolved_mtry(model->names.size());
  j["cv"] = to_json(cv.metrics);

  if (a.compare_random) {
    const std::size_t k = std::visit(
        [](const auto& s) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FoldAssignment>)
            return s.k;
          else
            return 5;
        },
        scheme);
    const FoldAssignment rnd = random_kfold(t.data.rows(), k, derive_seed(a.c.seed, "train-random-folds"));
    const CVResult rcv = cross_validate(t.data.select_columns(model->names), model->spec, rnd, a.c.par());
    j["random_cv"] = to_json(rcv.metrics);
  }

  write_json(to_json(*model), dir / "model.json");
  write_text(pooled_csv(cv), dir / "cv_predictions.csv");
  write_json(j, dir / "metrics.json");
  emit(j);
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  Common c;
  std::string model, raster, mask;
};

int run_predict(const PredictArgs& a) {
  const FittedModel model = model_from_json(read_json(a.model));
  const RasterStack stack = read_raster_stack(a.raster);
  const Grid pred = predict_raster(model, stack, a.c.par());
  const fs::path dir = a.c.dir();
  write_ascii_grid(pred, dir / "prediction.asc");
  Json j = header("predict");
  j["valid_cells"] = pred.valid_cells();
  if (!a.mask.empty()) {
    const Grid masked = mask_by_aoa(pred, read_ascii_grid(a.mask));
    write_ascii_grid(masked, dir / "prediction_masked.asc");
    j["masked_valid_cells"] = masked.valid_cells();
  }
  emit(j);
  return 0;
}

// ---- aoa -------------------------------------------------------------------

struct AoaArgs {
  Common c;
  std::string model, train, folds, raster, response;
  std::string metric = "euclidean";
  bool lpd = false;
};

int run_aoa(const AoaArgs& a) {
  const FittedModel model = model_from_json(read_json(a.model));
  const RasterStack stack = read_raster_stack(a.raster);
  const TrainingTable t = load_training(a.train, stack.geometry.crs, a.response);
  const FoldAssignment folds = as_folds(scheme_from_json(read_json(a.folds)), "aoa");
  TrainDIOptions options;
  options.metric = parse_metric(a.metric);
  options.seed = a.c.seed;
  const TrainDI trained = train_di(t.data, model, folds, options, a.c.par());
  const AOAResult res = aoa(stack, trained, t.data, a.lpd, a.c.par());
  const fs::path dir = a.c.dir();
  write_json(to_json(trained), dir / "trainDI.json");
  write_ascii_grid(res.di, dir / "di.asc");
  write_ascii_grid(res.aoa, dir / "aoa.asc");
  if (res.lpd) write_ascii_grid(*res.lpd, dir / "lpd.asc");

  std::size_t inside = 0, valid = 0;
  for (double v : res.aoa.values) {
    if (is_nodata(v)) continue;
    ++valid;
    inside += v == 1.0;
  }
  Json j = header("aoa");
  j["metric"] = a.metric;
  j["predictors"] = trained.names;
  j["weights"] = trained.weights;
  j["d_bar"] = trained.d_bar;
  j["threshold"] = trained.threshold;
  j["valid_cells"] = valid;
  j["inside_cells"] = inside;
  j["inside_fraction"] = valid ? static_cast<double>(inside) / static_cast<double>(valid) : 0.0;
  emit(j);
  return 0;
}

// ---- errorprofile ----------------------------------------------------------

struct ProfileArgs {
  Common c;
  std::string model, train, aoa_dir, response;
  std::string kind = "DI";
  std::size_t window = 0;
  bool multicv = false;
};

int run_errorprofile(const ProfileArgs& a) {
  const FittedModel model = model_from_json(read_json(a.model));
  const fs::path adir(a.aoa_dir);
  const TrainDI trained = train_di_from_json(read_json(adir / "trainDI.json"));
  const Grid di_grid = read_ascii_grid(adir / "di.asc");
  const Grid aoa_grid = read_ascii_grid(adir / "aoa.asc");
  const TrainingTable t = load_training(a.train, di_grid.geometry.crs, a.response);
  const Dataset data = t.data.select_columns(model.names);
  const ProfileKind kind = parse_profile_kind(a.kind);
  const std::optional<std::size_t> window = a.window ? std::optional<std::size_t>(a.window) : std::nullopt;

  ModelSpec spec = model.spec;
  spec.rf.permutation_importance = false;
  const fs::path dir = a.c.dir();
  Json j = header("errorprofile");
  j["kind"] = to_string(kind);

  ErrorProfile profile;
  Grid mask = aoa_grid;
  if (a.multicv) {
    const MultiCv m = multicv_calibrate(data, spec, trained, default_cluster_counts(data.rows()),
                                        derive_seed(a.c.seed, "errorprofile-multicv"), a.c.par());
    profile = error_profile(m.pooled, kind == ProfileKind::di ? m.di : m.lpd, window, kind);
    const TrainDI updated = update_threshold(trained, m.di);
    mask = aoa_mask(di_grid, updated.threshold);
    write_json(to_json(updated), dir / "trainDI_updated.json");
    write_ascii_grid(mask, dir / "aoa_updated.asc");
    Json runs = Json::array();
    for (const auto& r : m.runs) runs.push_back(Json{{"clusters", r.clusters}, {"cv", to_json(r.cv.metrics)}});
    j["runs"] = runs;
    j["threshold"] = trained.threshold;
    j["updated_threshold"] = updated.threshold;
  } else {
    std::vector<std::size_t> fold_of = trained.fold_of;
    const FoldAssignment folds = FoldAssignment::from_labels(fold_of, trained.k, "trainDI", a.c.seed);
    const CVResult cv = cross_validate(data, spec, folds, a.c.par());
    std::vector<double> values;
    if (kind == ProfileKind::di) {
      for (const auto& p : cv.pooled) values.push_back(trained.train_di[p.row]);
    } else {
      const auto lpd = cross_fold_lpd(trained, data, fold_of);
      for (const auto& p : cv.pooled) values.push_back(lpd[p.row]);
    }
    profile = error_profile(cv.pooled, values, window, kind);
    j["threshold"] = trained.threshold;
    j["cv"] = to_json(cv.metrics);
  }

  const Grid values = kind == ProfileKind::di ? di_grid : read_ascii_grid(adir / "lpd.asc");
  const Grid expected = predict_error(profile, values, kind, mask);
  write_json(to_json(profile), dir / "profile.json");
  write_text(plot_profile(profile), dir / "profile.svg");
  write_ascii_grid(expected, dir / "expected_error.asc");
  j["window"] = profile.window;
  j["windows"] = profile.windows.size();
  j["valid_range"] = {profile.valid_min, profile.valid_max};
  j["expected_error_cells"] = expected.valid_cells();
  emit(j);
  return 0;
}

// ---- render ----------------------------------------------------------------

struct RenderArgs {
  Common c;
  std::string grid, mask, title;
  std::string palette = "viridis";
};

int run_render(const RenderArgs& a) {
  const Grid g = read_ascii_grid(a.grid);
  std::optional<Grid> mask;
  if (!a.mask.empty()) mask = read_ascii_grid(a.mask);
  const std::string title = a.title.empty() ? fs::path(a.grid).stem().string() : a.title;
  const fs::path file = a.c.dir() / (fs::path(a.grid).stem().string() + ".svg");
  write_text(render_grid(g, parse_palette(a.palette), mask ? &*mask : nullptr, title), file);
  Json j = header("render");
  j["file"] = file.filename().string();
  j["valid_cells"] = g.valid_cells();
  emit(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spcv: spatial cross-validation, feature selection and area of applicability"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic predictor stack and training table");
  add_common(s, synth.c);
  s->add_option("--scenario", synth.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);

  GeodistArgs geo;
  auto* g = app.add_subcommand("geodist", "Nearest-neighbour distance distributions");
  add_common(g, geo.c);
  g->add_option("--train", geo.train, "Training CSV")->required()->check(CLI::ExistingFile);
  g->add_option("--raster", geo.raster, "Raster manifest")->required()->check(CLI::ExistingFile);
  g->add_option("--folds", geo.folds, "Folds JSON")->check(CLI::ExistingFile);
  g->add_option("--test", geo.test, "Test CSV")->check(CLI::ExistingFile);
  g->add_option("--response", geo.response, "Response column (default: last)");
  g->add_option("--space", geo.space, "Distance space")->check(CLI::IsMember({"geographic", "feature"}))->capture_default_str();
  g->add_option("--stat", geo.stat, "Plot statistic")->check(CLI::IsMember({"ecdf", "density"}))->capture_default_str();
  g->add_option("--domain-size", geo.domain_size, "Sampled prediction cells")->capture_default_str();

  FoldsArgs fo;
  auto* f = app.add_subcommand("folds", "Build cross-validation folds");
  add_common(f, fo.c);
  f->add_option("method", fo.method, "random|spacetime|nndm|knndm")
      ->required()
      ->check(CLI::IsMember({"random", "spacetime", "nndm", "knndm"}));
  f->add_option("--train", fo.train, "Training CSV")->required()->check(CLI::ExistingFile);
  f->add_option("--raster", fo.raster, "Raster manifest")->check(CLI::ExistingFile);
  f->add_option("--response", fo.response, "Response column (default: last)");
  f->add_option("-k", fo.k, "Number of folds")->capture_default_str();
  f->add_option("--space-var", fo.space_var, "Column with spatial group labels (spacetime)");
  f->add_option("--time-var", fo.time_var, "Column with temporal group labels (spacetime)");
  f->add_option("--min-train", fo.min_train, "Minimum training fraction (nndm)")->capture_default_str();
  f->add_option("--domain-size", fo.domain_size, "Sampled prediction cells")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Cross-validate and fit a model");
  add_common(t, tr.c);
  t->add_option("--train", tr.train, "Training CSV")->required()->check(CLI::ExistingFile);
  t->add_option("--folds", tr.folds, "Folds JSON")->required()->check(CLI::ExistingFile);
  t->add_option("--response", tr.response, "Response column (default: last)");
  t->add_option("--crs", tr.crs, "Coordinate kind")->check(CLI::IsMember({"projected", "geographic"}))->capture_default_str();
  t->add_option("--model", tr.model, "Model")->check(CLI::IsMember({"rf", "knn"}))->capture_default_str();
  t->add_option("--num-trees", tr.num_trees, "Trees")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--mtry", tr.mtry, "Predictors per split or 'auto' (tuned)")->capture_default_str();
  t->add_option("--min-node-size", tr.min_node_size, "Minimum node size")->capture_default_str();
  t->add_option("--knn-k", tr.knn_k, "Neighbours for knn")->capture_default_str();
  t->add_flag("--ffs", tr.ffs, "Forward feature selection");
  t->add_flag("--compare-random", tr.compare_random, "Also report random k-fold metrics");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Predict a raster stack");
  add_common(p, pr.c);
  p->add_option("--model", pr.model, "Model JSON")->required()->check(CLI::ExistingFile);
  p->add_option("--raster", pr.raster, "Raster manifest")->required()->check(CLI::ExistingFile);
  p->add_option("--mask", pr.mask, "AOA grid; cells outside become nodata")->check(CLI::ExistingFile);

  AoaArgs ao;
  auto* a = app.add_subcommand("aoa", "Dissimilarity index and area of applicability");
  add_common(a, ao.c);
  a->add_option("--model", ao.model, "Model JSON")->required()->check(CLI::ExistingFile);
  a->add_option("--train", ao.train, "Training CSV")->required()->check(CLI::ExistingFile);
  a->add_option("--folds", ao.folds, "Folds JSON")->required()->check(CLI::ExistingFile);
  a->add_option("--raster", ao.raster, "Raster manifest")->required()->check(CLI::ExistingFile);
  a->add_option("--response", ao.response, "Response column (default: last)");
  a->add_option("--metric", ao.metric, "Distance")->check(CLI::IsMember({"euclidean", "mahalanobis"}))->capture_default_str();
  a->add_flag("--lpd", ao.lpd, "Also compute local point density");

  ProfileArgs pf;
  auto* e = app.add_subcommand("errorprofile", "Expected error as a function of DI or LPD");
  add_common(e, pf.c);
  e->add_option("--model", pf.model, "Model JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--train", pf.train, "Training CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--aoa", pf.aoa_dir, "Output directory of the aoa command")->required()->check(CLI::ExistingDirectory);
  e->add_option("--response", pf.response, "Response column (default: last)");
  e->add_option("--kind", pf.kind, "Profile variable")->check(CLI::IsMember({"DI", "LPD"}))->capture_default_str();
  e->add_option("--window", pf.window, "Moving-window size (default max(10, n/20))");
  e->add_flag("--multicv", pf.multicv, "Calibrate with predictor-space cluster CV");

  RenderArgs re;
  auto* r = app.add_subcommand("render", "Render a grid as SVG");
  add_common(r, re.c);
  r->add_option("--grid", re.grid, "ASCII grid")->required()->check(CLI::ExistingFile);
  r->add_option("--mask", re.mask, "Mask grid (0 or nodata hidden)")->check(CLI::ExistingFile);
  r->add_option("--palette", re.palette, "Palette")->check(CLI::IsMember({"viridis", "magma", "greys"}))->capture_default_str();
  r->add_option("--title", re.title, "Title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*s) return run_synth(synth, s->count("--seed") > 0);
    if (*g) return run_geodist(geo);
    if (*f) return run_folds(fo);
    if (*t) return run_train(tr);
    if (*p) return run_predict(pr);
    if (*a) return run_aoa(ao);
    if (*e) return run_errorprofile(pf);
    if (*r) return run_render(re);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
