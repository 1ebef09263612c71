#include "spatialcv/aoa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "spatialcv/error.hpp"
#include "spatialcv/log.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/rng.hpp"
#include "spatialcv/stats.hpp"

namespace spcv {

DistanceMetric parse_metric(const std::string& name) {
  if (name == "euclidean") return DistanceMetric::euclidean;
  if (name == "mahalanobis") return DistanceMetric::mahalanobis;
  throw PreconditionError("unknown metric '" + name + "' (expected euclidean|mahalanobis)");
}

std::string to_string(DistanceMetric m) { return m == DistanceMetric::euclidean ? "euclidean" : "mahalanobis"; }

namespace {

std::vector<std::size_t> active_columns(const std::vector<double>& weights) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < weights.size(); ++c)
    if (weights[c] > 0.0) out.push_back(c);
  return out;
}

}  // namespace

Matrix TrainDI::transform(const Matrix& rows) const {
  require(rows.cols() == names.size(), "TrainDI: expected " + std::to_string(names.size()) + " predictor columns");
  Matrix z(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r)
    for (std::size_t c = 0; c < rows.cols(); ++c) z(r, c) = weights[c] * ((rows(r, c) - means[c]) / sds[c]);
  if (metric == DistanceMetric::euclidean) return z;

  const auto active = active_columns(weights);
  const std::size_t q = active.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> L(cholesky.data(),
                                                                                              static_cast<Eigen::Index>(q),
                                                                                              static_cast<Eigen::Index>(q));
  Matrix out(rows.rows(), q);
  Eigen::VectorXd v(static_cast<Eigen::Index>(q));
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t j = 0; j < q; ++j) v(static_cast<Eigen::Index>(j)) = z(r, active[j]);
    L.triangularView<Eigen::Lower>().solveInPlace(v);
    for (std::size_t j = 0; j < q; ++j) out(r, j) = v(static_cast<Eigen::Index>(j));
  }
  return out;
}

void TrainDI::validate() const {
  const std::size_t p = names.size();
  require(p >= 1, "TrainDI: no predictors");
  require(means.size() == p && sds.size() == p && weights.size() == p, "TrainDI: parameter lengths differ");
  for (std::size_t c = 0; c < p; ++c) {
    require(sds[c] > 0.0, "TrainDI: sd of '" + names[c] + "' must be positive");
    require(weights[c] >= 0.0, "TrainDI: weights must be nonnegative");
  }
  require(d_bar > 0.0, "TrainDI: d_bar must be positive");
  require(threshold >= 0.0, "TrainDI: threshold must be nonnegative");
  if (metric == DistanceMetric::mahalanobis) {
    const std::size_t q = active_columns(weights).size();
    require(cholesky.size() == q * q, "TrainDI: Cholesky factor has the wrong size");
  }
}

TrainDI train_di(const Dataset& data, const FittedModel& model, const FoldAssignment& folds,
                 const TrainDIOptions& options, const Parallel& par) {
  data.validate();
  folds.validate();
  require(folds.n == data.rows(), "train_di: folds cover " + std::to_string(folds.n) + " rows but the dataset has " +
                                      std::to_string(data.rows()));
  const Dataset used = data.select_columns(model.names);
  const ColumnScaling scaling = ColumnScaling::fit(used.X);

  TrainDI t;
  t.metric = options.metric;
  std::vector<std::size_t> kept;
  std::vector<double> importance;
  for (std::size_t c = 0; c < used.cols(); ++c) {
    if (!(scaling.sds[c] > 0.0)) {
      warn("train_di: predictor '" + used.names[c] + "' has zero variance and is dropped");
      t.dropped.push_back(used.names[c]);
      continue;
    }
    kept.push_back(c);
    t.names.push_back(used.names[c]);
    t.means.push_back(scaling.means[c]);
    t.sds.push_back(scaling.sds[c]);
    importance.push_back(c < model.importance.size() ? model.importance[c] : 0.0);
  }
  require(!kept.empty(), "train_di: every predictor has zero variance");
  const double imp_mean = std::accumulate(importance.begin(), importance.end(), 0.0) /
                          static_cast<double>(importance.size());
  if (imp_mean > 0.0 && std::all_of(importance.begin(), importance.end(), [](double v) { return v >= 0.0; })) {
    for (double v : importance) t.weights.push_back(v / imp_mean);
  } else {
    t.weights.assign(kept.size(), 1.0);
  }

  const Matrix raw = used.X.select_cols(kept);
  if (t.metric == DistanceMetric::mahalanobis) {
    t.metric = DistanceMetric::euclidean;  // weighted-standardized rows first
    const Matrix z = t.transform(raw);
    t.metric = DistanceMetric::mahalanobis;
    const auto active = active_columns(t.weights);
    const auto q = static_cast<Eigen::Index>(active.size());
    const auto n = static_cast<Eigen::Index>(z.rows());
    Eigen::MatrixXd m(n, q);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index j = 0; j < q; ++j) m(r, j) = z(static_cast<std::size_t>(r), active[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::MatrixXd L = llt.matrixL();
    const double scale = cov.diagonal().cwiseAbs().maxCoeff();
    if (llt.info() != Eigen::Success || !(L.diagonal().minCoeff() > 1e-10 * std::sqrt(scale)))
      throw DataError("train_di: predictor covariance is singular; use the euclidean metric instead");
    t.cholesky.resize(static_cast<std::size_t>(q * q));
    for (Eigen::Index r = 0; r < q; ++r)
      for (Eigen::Index c = 0; c < q; ++c) t.cholesky[static_cast<std::size_t>(r * q + c)] = c <= r ? L(r, c) : 0.0;
  }

  const Matrix z = t.transform(raw);
  const std::size_t n = z.rows();
  auto pair_distance = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) {
      const double d = z(i, c) - z(j, c);
      s += d * d;
    }
    return std::sqrt(s);
  };

  if (n <= options.exact_pair_limit) {
    std::vector<double> row_sums(n, 0.0);
    par.for_each_index(n, [&](std::size_t i) {
      double s = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) s += pair_distance(i, j);
      row_sums[i] = s;
    });
    const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    t.d_bar = total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  } else {
    Rng rng(derive_seed(options.seed, "trainDI-dbar"));
    double s = 0.0;
    for (std::size_t m = 0; m < options.sampled_pairs; ++m) {
      const std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      s += pair_distance(i, j);
    }
    t.d_bar = s / static_cast<double>(options.sampled_pairs);
  }
  if (!(t.d_bar > 0.0)) throw DataError("train_di: all training rows are identical (mean pairwise distance is 0)");

  t.fold_of = folds.fold_of;
  t.k = folds.k;
  t.train_di.assign(n, 0.0);
  par.for_each_index(folds.k, [&](std::size_t f) {
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i)
      if (folds.fold_of[i] != f) others.push_back(i);
    const NnIndex index(z.select_rows(others));
    for (std::size_t i = 0; i < n; ++i)
      if (folds.fold_of[i] == f) t.train_di[i] = index.nearest(z.row(i)).distance / t.d_bar;
  });
  t.threshold = upper_whisker(t.train_di);
  t.validate();
  return t;
}

namespace {

Matrix training_space(const TrainDI& trained, const Dataset& data) {
  return trained.transform(data.select_columns(trained.names).X);
}

}  // namespace

RowDI di_of_rows(const TrainDI& trained, const Dataset& data, const Matrix& rows, const Parallel& par) {
  trained.validate();
  const Matrix train = training_space(trained, data);
  const Matrix q = trained.transform(rows);
  const NnIndex index(train);
  RowDI out;
  out.di.resize(q.rows());
  out.lpd.resize(q.rows());
  par.for_each_index(q.rows(), [&](std::size_t r) {
    out.di[r] = index.nearest(q.row(r)).distance / trained.d_bar;
    std::size_t count = 0;
    index.for_each_within(q.row(r), trained.threshold * trained.d_bar, [&](std::size_t, double d) {
      if (d / trained.d_bar <= trained.threshold) ++count;
    });
    out.lpd[r] = count;
  });
  return out;
}

std::vector<double> cross_fold_di(const TrainDI& trained, const Dataset& data, const std::vector<std::size_t>& fold_of) {
  trained.validate();
  const Matrix z = training_space(trained, data);
  require(fold_of.size() == z.rows(), "cross_fold_di: fold labels do not match the dataset");
  std::size_t k = 0;
  for (std::size_t f : fold_of) k = std::max(k, f + 1);
  std::vector<double> out(z.rows(), 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < z.rows(); ++i)
      if (fold_of[i] != f) others.push_back(i);
    require(!others.empty(), "cross_fold_di: a fold contains every row");
    const NnIndex index(z.select_rows(others));
    for (std::size_t i = 0; i < z.rows(); ++i)
      if (fold_of[i] == f) out[i] = index.nearest(z.row(i)).distance / trained.d_bar;
  }
  return out;
}

std::vector<double> cross_fold_lpd(const TrainDI& trained, const Dataset& data, const std::vector<std::size_t>& fold_of) {
  trained.validate();
  const Matrix z = training_space(trained, data);
  require(fold_of.size() == z.rows(), "cross_fold_lpd: fold labels do not match the dataset");
  const NnIndex index(z);
  std::vector<double> out(z.rows(), 0.0);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    std::size_t count = 0;
    index.for_each_within(z.row(i), trained.threshold * trained.d_bar, [&](std::size_t j, double d) {
      if (fold_of[j] != fold_of[i] && d / trained.d_bar <= trained.threshold) ++count;
    });
    out[i] = static_cast<double>(count);
  }
  return out;
}

AOAResult aoa(const RasterStack& grid, const TrainDI& trained, const Dataset& data, bool compute_lpd,
              const Parallel& par) {
  trained.validate();
  std::vector<const Band*> bands;
  for (const auto& nm : trained.names) {
    const Band* b = grid.find(nm);
    if (!b) throw DataError("aoa: raster stack is missing band '" + nm + "'");
    bands.push_back(b);
  }
  const Matrix train = training_space(trained, data);
  const NnIndex index(train);

  AOAResult res;
  res.parameters = trained;
  res.di = Grid(grid.geometry);
  res.aoa = Grid(grid.geometry);
  if (compute_lpd) res.lpd = Grid(grid.geometry);

  const std::size_t cells = grid.geometry.cells();
  constexpr std::size_t kTile = 512;
  const std::size_t tiles = (cells + kTile - 1) / kTile;
  par.for_each_index(tiles, [&](std::size_t t) {
    Matrix one(1, bands.size());
    for (std::size_t c = t * kTile; c < std::min(cells, (t + 1) * kTile); ++c) {
      bool valid = true;
      for (std::size_t b = 0; b < bands.size() && valid; ++b) {
        one(0, b) = bands[b]->values[c];
        valid = !is_nodata(one(0, b));
      }
      if (!valid) continue;
      const Matrix z = trained.transform(one);
      const double di = index.nearest(z.row(0)).distance / trained.d_bar;
      res.di.values[c] = di;
      res.aoa.values[c] = di <= trained.threshold ? 1.0 : 0.0;
      if (compute_lpd) {
        std::size_t count = 0;
        index.for_each_within(z.row(0), trained.threshold * trained.d_bar, [&](std::size_t, double d) {
          if (d / trained.d_bar <= trained.threshold) ++count;
        });
        res.lpd->values[c] = static_cast<double>(count);
      }
    }
  });
  return res;
}

Grid aoa_mask(const Grid& di, double threshold) {
  Grid out(di.geometry);
  for (std::size_t c = 0; c < di.values.size(); ++c)
    if (!is_nodata(di.values[c])) out.values[c] = di.values[c] <= threshold ? 1.0 : 0.0;
  return out;
}

Grid mask_by_aoa(const Grid& values, const Grid& aoa_grid) {
  if (!values.geometry.same_shape(aoa_grid.geometry) || values.values.size() != aoa_grid.values.size())
    throw PreconditionError("mask_by_aoa: grids are not aligned");
  Grid out = values;
  for (std::size_t c = 0; c < out.values.size(); ++c)
    if (aoa_grid.values[c] == 0.0) out.values[c] = kNoData;
  return out;
}

TrainDI update_threshold(const TrainDI& trained, const std::vector<double>& new_train_di) {
  require(!new_train_di.empty(), "update_threshold: no DI values supplied");
  TrainDI out = trained;
  out.threshold = upper_whisker(new_train_di);
  return out;
}

}  // namespace spcv
