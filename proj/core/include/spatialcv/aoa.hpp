#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatialcv/folds.hpp"
#include "spatialcv/model.hpp"
#include "spatialcv/raster.hpp"

namespace spcv {

enum class DistanceMetric { euclidean, mahalanobis };

DistanceMetric parse_metric(const std::string& name);
std::string to_string(DistanceMetric m);

/// Frozen normalization, weighting and threshold of the dissimilarity index.
/// Immutable once built; safe to share across workers.
struct TrainDI {
  std::vector<std::string> names;  // retained predictors
  std::vector<double> means;
  std::vector<double> sds;
  std::vector<double> weights;     // importance rescaled to mean 1
  std::vector<std::string> dropped;  // zero-variance predictors
  DistanceMetric metric = DistanceMetric::euclidean;
  /// Mahalanobis only: lower Cholesky factor (row-major, q x q) of the
  /// covariance of the weighted, standardized predictors with nonzero weight.
  std::vector<double> cholesky;
  double d_bar = 0.0;
  std::vector<double> train_di;
  double threshold = 0.0;
  std::vector<std::size_t> fold_of;
  std::size_t k = 0;

  /// Maps raw predictor rows (columns in `names` order) into the space where
  /// Euclidean distance equals the chosen metric.
  Matrix transform(const Matrix& rows) const;
  void validate() const;
};

struct TrainDIOptions {
  DistanceMetric metric = DistanceMetric::euclidean;
  std::uint64_t seed = 0;  // only used when d_bar is estimated from sampled pairs
  std::size_t exact_pair_limit = 20000;  // above this many rows, d_bar uses sampled pairs
  std::size_t sampled_pairs = 20'000'000;
};

/// Builds the training dissimilarity index from cross-fold nearest neighbours.
TrainDI train_di(const Dataset& data, const FittedModel& model, const FoldAssignment& folds,
                 const TrainDIOptions& options = {}, const Parallel& par = {});

struct AOAResult {
  Grid di;
  Grid aoa;                 // 1 inside, 0 outside, nodata where predictors are missing
  std::optional<Grid> lpd;  // number of training rows within the threshold
  TrainDI parameters;
};

/// Dissimilarity index, applicability mask and (optionally) local point
/// density for every raster cell.
AOAResult aoa(const RasterStack& grid, const TrainDI& trained, const Dataset& data, bool compute_lpd,
              const Parallel& par = {});

struct RowDI {
  std::vector<double> di;
  std::vector<std::size_t> lpd;
};

/// DI and LPD of arbitrary predictor rows (columns in `trained.names` order).
RowDI di_of_rows(const TrainDI& trained, const Dataset& data, const Matrix& rows, const Parallel& par = {});

/// Cross-fold DI of the training rows under another fold partition, using the
/// frozen scaling, weights and d_bar of `trained`.
std::vector<double> cross_fold_di(const TrainDI& trained, const Dataset& data, const std::vector<std::size_t>& fold_of);

/// Cross-fold LPD of the training rows (count of rows outside the own fold
/// within the threshold).
std::vector<double> cross_fold_lpd(const TrainDI& trained, const Dataset& data, const std::vector<std::size_t>& fold_of);

/// Applicability mask of a DI grid for a threshold.
Grid aoa_mask(const Grid& di, double threshold);

/// Sets cells where the AOA grid is 0 to nodata.
Grid mask_by_aoa(const Grid& values, const Grid& aoa_grid);

/// Recomputes the threshold (upper whisker) from new DI values.
TrainDI update_threshold(const TrainDI& trained, const std::vector<double>& new_train_di);

}  // namespace spcv
