#include "spatialcv/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spatialcv/error.hpp"

namespace spcv {

void Dataset::validate() const {
  require(X.cols() >= 1, "dataset: need at least one predictor");
  require(X.rows() >= 2, "dataset: need at least two rows");
  require(y.size() == X.rows(), "dataset: response length differs from row count");
  require(names.size() == X.cols(), "dataset: predictor names do not match column count");
  std::set<std::string> seen;
  for (const auto& nm : names) require(seen.insert(nm).second, "dataset: duplicate predictor name '" + nm + "'");
  for (std::size_t r = 0; r < X.rows(); ++r) {
    require(std::isfinite(y[r]), "dataset: non-finite response in row " + std::to_string(r));
    for (std::size_t c = 0; c < X.cols(); ++c)
      require(std::isfinite(X(r, c)), "dataset: non-finite predictor '" + names[c] + "' in row " + std::to_string(r));
  }
  if (points) require(points->size() == X.rows(), "dataset: point count differs from row count");
}

std::size_t Dataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < names.size(); ++c)
    if (names[c] == name) return c;
  throw DataError("dataset has no predictor named '" + name + "'");
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.X = X.select_rows(rows);
  out.names = names;
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(y.at(r));
  if (points) out.points = points->subset(rows);
  return out;
}

Dataset Dataset::select_columns(const std::vector<std::string>& columns) const {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(column_index(c));
  Dataset out;
  out.X = X.select_cols(idx);
  out.y = y;
  out.names = columns;
  out.points = points;
  return out;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "rf") return ModelKind::rf;
  if (name == "knn") return ModelKind::knn;
  throw PreconditionError("unknown model kind '" + name + "' (expected rf|knn)");
}

std::string to_string(ModelKind kind) { return kind == ModelKind::rf ? "rf" : "knn"; }

namespace {

Matrix standardized_or_raw(const Matrix& x, const ColumnScaling& s, bool standardize) {
  return standardize ? s.apply(x) : x;
}

}  // namespace

KnnRegressor::KnnRegressor(const Matrix& x, std::vector<double> y, std::size_t k, bool standardize)
    : raw_(x),
      y_(std::move(y)),
      k_(k),
      standardize_(standardize),
      scaling_(ColumnScaling::fit(x)),
      scaled_(standardized_or_raw(x, scaling_, standardize)),
      index_(scaled_) {
  require(k_ >= 1 && k_ <= raw_.rows(), "knn: k_neighbors = " + std::to_string(k_) + " outside [1, " +
                                            std::to_string(raw_.rows()) + "]");
  require(y_.size() == raw_.rows(), "knn: response length differs from row count");
}

double KnnRegressor::predict(std::span<const double> row) const {
  std::vector<double> q(row.begin(), row.end());
  if (standardize_)
    for (std::size_t c = 0; c < q.size(); ++c) {
      q[c] -= scaling_.means[c];
      if (scaling_.sds[c] > 0.0) q[c] /= scaling_.sds[c];
    }
  const auto hits = index_.k_nearest(q, k_);
  double s = 0.0;
  for (const auto& h : hits) s += y_[h.index];
  return s / static_cast<double>(hits.size());
}

std::vector<double> FittedModel::predict_aligned(const Matrix& x) const {
  require(x.cols() == names.size(), "model: expected " + std::to_string(names.size()) + " predictors, got " +
                                        std::to_string(x.cols()));
  return std::visit(
      [&](const auto& m) {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = m.predict(x.row(r));
        return out;
      },
      impl);
}

std::vector<double> FittedModel::predict(const Matrix& x, const std::vector<std::string>& columns) const {
  require(columns.size() == x.cols(), "model: column names do not match the matrix");
  std::vector<std::size_t> idx;
  for (const auto& nm : names) {
    auto it = std::find(columns.begin(), columns.end(), nm);
    if (it == columns.end()) throw DataError("model predictor '" + nm + "' is missing from the input");
    idx.push_back(static_cast<std::size_t>(it - columns.begin()));
  }
  return predict_aligned(x.select_cols(idx));
}

FittedModel fit_rf(const Dataset& data, const RFParams& params, const Parallel& par) {
  data.validate();
  FittedModel m;
  m.spec.kind = ModelKind::rf;
  m.spec.rf = params;
  m.names = data.names;
  auto rf = RandomForest::fit(data.X, data.y, params, par);
  m.importance = rf.importance();
  m.impl = std::move(rf);
  return m;
}

FittedModel fit_knn(const Dataset& data, std::size_t k_neighbors, bool standardize) {
  data.validate();
  FittedModel m;
  m.spec.kind = ModelKind::knn;
  m.spec.knn_k = k_neighbors;
  m.spec.knn_standardize = standardize;
  m.names = data.names;
  m.importance.assign(data.cols(), 1.0);
  m.impl = KnnRegressor(data.X, data.y, k_neighbors, standardize);
  return m;
}

FittedModel fit_model(const Dataset& data, const ModelSpec& spec, const Parallel& par) {
  if (spec.kind == ModelKind::rf) return fit_rf(data, spec.rf, par);
  return fit_knn(data, spec.knn_k, spec.knn_standardize);
}

Metrics global_validation(std::span<const PooledPrediction> pooled) {
  Metrics m;
  m.n = pooled.size();
  if (pooled.empty()) return m;
  const double n = static_cast<double>(pooled.size());
  double se = 0.0, ae = 0.0, mo = 0.0, mp = 0.0;
  for (const auto& p : pooled) {
    const double e = p.observed - p.predicted;
    se += e * e;
    ae += std::abs(e);
    mo += p.observed;
    mp += p.predicted;
  }
  mo /= n;
  mp /= n;
  m.rmse = std::sqrt(se / n);
  m.mae = ae / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& p : pooled) {
    const double a = p.observed - mo, b = p.predicted - mp;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx > 0.0 && syy > 0.0) {
    const double r = sxy / std::sqrt(sxx * syy);
    m.r2 = r * r;
  }
  if (sxx > 0.0) m.r2_sse = 1.0 - se / sxx;
  return m;
}

CVResult cross_validate(const Dataset& data, const ModelSpec& spec, const CvScheme& scheme, const Parallel& par) {
  data.validate();
  const std::size_t n = data.rows();
  if (scheme_size(scheme) != n)
    throw PreconditionError("cross_validate: scheme covers " + std::to_string(scheme_size(scheme)) +
                            " rows but the dataset has " + std::to_string(n));

  struct Job {
    std::vector<std::size_t> train, test;
  };
  std::vector<Job> jobs;
  if (const auto* fa = std::get_if<FoldAssignment>(&scheme)) {
    fa->validate();
    for (std::size_t f = 0; f < fa->k; ++f) jobs.push_back({fa->index_train[f], fa->held_out(f)});
  } else {
    const auto& ex = std::get<NNDMExclusion>(scheme);
    ex.validate();
    for (std::size_t i = 0; i < n; ++i) jobs.push_back({ex.training_rows(i), {i}});
  }

  ModelSpec fold_spec = spec;
  fold_spec.rf.permutation_importance = false;
  if (fold_spec.kind == ModelKind::knn) {
    std::size_t smallest = n;
    for (const auto& j : jobs) smallest = std::min(smallest, j.train.size());
    if (fold_spec.knn_k > smallest)
      throw PreconditionError("cross_validate: k_neighbors exceeds the smallest training side (" +
                              std::to_string(smallest) + " rows)");
  }

  std::vector<PooledPrediction> pooled(n);
  par.for_each_index(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    if (job.train.empty()) throw PreconditionError("cross_validate: fold " + std::to_string(j) + " has no training rows");
    const FittedModel model = fit_model(data.select_rows(job.train), fold_spec);
    const auto pred = model.predict_aligned(data.X.select_rows(job.test));
    for (std::size_t t = 0; t < job.test.size(); ++t) {
      const std::size_t row = job.test[t];
      pooled[row] = {row, j, data.y[row], pred[t]};
    }
  });

  CVResult cv;
  cv.pooled = std::move(pooled);
  cv.metrics = global_validation(cv.pooled);
  return cv;
}

TuneResult tune(const Dataset& data, const CvScheme& scheme, const std::vector<RFParams>& grid, const Parallel& par) {
  require(!grid.empty(), "tune: empty tuning grid");
  TuneResult res;
  std::optional<CVResult> best_cv;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ModelSpec spec;
    spec.kind = ModelKind::rf;
    spec.rf = grid[g];
    CVResult cv = cross_validate(data, spec, scheme, par);
    res.table.push_back({grid[g], cv.metrics});
    if (!best_cv || cv.metrics.rmse < best_cv->metrics.rmse) {
      best_cv = std::move(cv);
      res.best_index = g;
    }
  }
  res.best = grid[res.best_index];
  res.best_cv = std::move(*best_cv);
  res.final_model = fit_rf(data, res.best, par);
  return res;
}

std::vector<RFParams> default_tuning_grid(std::size_t p, const RFParams& base) {
  std::vector<RFParams> grid;
  const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))));
  for (std::size_t m : {root, p / 2, p}) {
    m = std::clamp<std::size_t>(m, 1, p);
    if (std::any_of(grid.begin(), grid.end(), [m](const RFParams& r) { return r.mtry == m; })) continue;
    RFParams r = base;
    r.mtry = m;
    grid.push_back(r);
  }
  return grid;
}

Matrix raster_rows(const RasterStack& grid, const std::vector<std::string>& names, std::span<const std::size_t> cells) {
  std::vector<const Band*> bands;
  for (const auto& nm : names) {
    const Band* b = grid.find(nm);
    if (!b) throw DataError("raster stack is missing band '" + nm + "'");
    bands.push_back(b);
  }
  Matrix out(cells.size(), names.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t c = 0; c < bands.size(); ++c) out(i, c) = bands[c]->values[cells[i]];
  return out;
}

Grid predict_raster(const FittedModel& model, const RasterStack& grid, const Parallel& par) {
  std::vector<const Band*> bands;
  for (const auto& nm : model.names) {
    const Band* b = grid.find(nm);
    if (!b) throw DataError("raster stack is missing band '" + nm + "' required by the model");
    bands.push_back(b);
  }
  Grid out(grid.geometry);
  const std::size_t cells = grid.geometry.cells();
  constexpr std::size_t kTile = 1024;
  const std::size_t tiles = (cells + kTile - 1) / kTile;
  par.for_each_index(tiles, [&](std::size_t t) {
    Matrix one(1, bands.size());
    for (std::size_t c = t * kTile; c < std::min(cells, (t + 1) * kTile); ++c) {
      if (!grid.cell_valid(c)) continue;
      for (std::size_t b = 0; b < bands.size(); ++b) one(0, b) = bands[b]->values[c];
      out.values[c] = model.predict_aligned(one)[0];
    }
  });
  return out;
}

}  // namespace spcv
