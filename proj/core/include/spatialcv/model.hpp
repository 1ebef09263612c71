#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spatialcv/folds.hpp"
#include "spatialcv/geom.hpp"
#include "spatialcv/matrix.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/parallel.hpp"
#include "spatialcv/random_forest.hpp"
#include "spatialcv/raster.hpp"
#include "spatialcv/stats.hpp"

namespace spcv {

/// Training table: predictors, response and (optionally) sample locations.
struct Dataset {
  Matrix X;
  std::vector<double> y;
  std::vector<std::string> names;
  std::optional<PointSet> points;

  std::size_t rows() const { return X.rows(); }
  std::size_t cols() const { return X.cols(); }
  void validate() const;
  std::size_t column_index(const std::string& name) const;
  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_columns(const std::vector<std::string>& columns) const;
};

enum class ModelKind { rf, knn };

ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::rf;
  RFParams rf;
  std::size_t knn_k = 5;
  bool knn_standardize = true;
};

/// k-nearest-neighbour regressor on (optionally) standardized predictors.
class KnnRegressor {
 public:
  KnnRegressor(const Matrix& x, std::vector<double> y, std::size_t k, bool standardize);

  double predict(std::span<const double> row) const;
  std::size_t k() const { return k_; }
  bool standardize() const { return standardize_; }
  const Matrix& raw_rows() const { return raw_; }
  const std::vector<double>& response() const { return y_; }

 private:
  Matrix raw_;
  std::vector<double> y_;
  std::size_t k_;
  bool standardize_;
  ColumnScaling scaling_;
  Matrix scaled_;
  NnIndex index_;
};

/// A trained model bound to the predictor names it was trained on.
struct FittedModel {
  ModelSpec spec;
  std::vector<std::string> names;
  std::vector<double> importance;  // one nonnegative score per predictor
  std::variant<RandomForest, KnnRegressor> impl;

  ModelKind kind() const { return spec.kind; }
  /// Rows whose columns are already in `names` order.
  std::vector<double> predict_aligned(const Matrix& x) const;
  /// Realigns `x` by column name; throws DataError naming a missing predictor.
  std::vector<double> predict(const Matrix& x, const std::vector<std::string>& columns) const;
};

FittedModel fit_rf(const Dataset& data, const RFParams& params, const Parallel& par = {});
FittedModel fit_knn(const Dataset& data, std::size_t k_neighbors, bool standardize = true);
FittedModel fit_model(const Dataset& data, const ModelSpec& spec, const Parallel& par = {});

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;      // squared Pearson correlation of (observed, predicted)
  std::optional<double> r2_sse;  // 1 - SSE/SST, reported for comparison
  std::size_t n = 0;
};

struct PooledPrediction {
  std::size_t row = 0;
  std::size_t fold = 0;  // fold id, or LOO iteration for NNDM schemes
  double observed = 0.0;
  double predicted = 0.0;
};

struct CVResult {
  std::vector<PooledPrediction> pooled;  // sorted by row for a single scheme
  Metrics metrics;
};

/// Metrics computed on pooled held-out predictions.
Metrics global_validation(std::span<const PooledPrediction> pooled);
inline Metrics global_validation(const CVResult& cv) { return global_validation(cv.pooled); }

/// Fits on each fold's training side and predicts its held-out rows (or each
/// LOO iteration for NNDM exclusion sets), then pools the predictions.
CVResult cross_validate(const Dataset& data, const ModelSpec& spec, const CvScheme& scheme,
                        const Parallel& par = {});

struct TuneRow {
  RFParams params;
  Metrics metrics;
};

struct TuneResult {
  RFParams best;
  std::size_t best_index = 0;
  std::vector<TuneRow> table;
  CVResult best_cv;
  FittedModel final_model;  // refit on all rows with `best`
};

/// Picks the grid entry with the lowest pooled RMSE (first on ties) and
/// refits it on all rows.
TuneResult tune(const Dataset& data, const CvScheme& scheme, const std::vector<RFParams>& grid,
                const Parallel& par = {});

/// mtry in {floor(sqrt(p)), floor(p/2), p}, deduplicated, other fields from `base`.
std::vector<RFParams> default_tuning_grid(std::size_t p, const RFParams& base);

/// Predicts every cell whose bands are all valid; other cells become nodata.
Grid predict_raster(const FittedModel& model, const RasterStack& grid, const Parallel& par = {});

/// Predictor rows of the given raster cells, columns in `names` order.
Matrix raster_rows(const RasterStack& grid, const std::vector<std::string>& names,
                   std::span<const std::size_t> cells);

}  // namespace spcv
