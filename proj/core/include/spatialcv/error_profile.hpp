#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatialcv/aoa.hpp"
#include "spatialcv/model.hpp"
#include "spatialcv/raster.hpp"

namespace spcv {

enum class ProfileKind { di, lpd };

ProfileKind parse_profile_kind(const std::string& name);
std::string to_string(ProfileKind kind);

struct WindowStat {
  double center = 0.0;  // mean predictor value in the window
  double rmse = 0.0;
  std::size_t size = 0;
};

/// Monotone piecewise-linear map from DI (nondecreasing) or LPD
/// (nonincreasing) to expected RMSE, clamped outside the calibration range.
struct ErrorProfile {
  ProfileKind kind = ProfileKind::di;
  std::size_t window = 0;
  std::vector<WindowStat> windows;
  std::vector<double> knots_x;  // strictly increasing
  std::vector<double> knots_y;
  double valid_min = 0.0;
  double valid_max = 0.0;

  double operator()(double value) const;
  void validate() const;
};

/// Pool-adjacent-violators fit: the nondecreasing sequence closest to `y` in
/// weighted least squares.
std::vector<double> isotonic_increasing(const std::vector<double>& y, const std::vector<double>& w);

/// Default moving-window size: max(10, n / 20).
std::size_t default_window(std::size_t n);

/// Moving-window RMSE of pooled CV residuals against the per-row values,
/// fitted with isotonic regression. `values[i]` belongs to `pooled[i]`.
ErrorProfile error_profile(const std::vector<PooledPrediction>& pooled, const std::vector<double>& values,
                           std::optional<std::size_t> window = std::nullopt, ProfileKind kind = ProfileKind::di);

struct MultiCvRun {
  std::size_t clusters = 0;
  CVResult cv;
  std::vector<double> di;   // per pooled row, cross-fold DI
  std::vector<double> lpd;  // per pooled row, cross-fold LPD
};

struct MultiCv {
  std::vector<MultiCvRun> runs;          // ascending cluster count
  std::vector<PooledPrediction> pooled;  // all runs, by cluster count then row
  std::vector<double> di;
  std::vector<double> lpd;
};

/// {3, 5, 10, 20, n}, capped at n and deduplicated.
std::vector<std::size_t> default_cluster_counts(std::size_t n);

/// Repeats cross-validation with folds given by k-means clusters of the
/// standardized predictors for each count. A count equal to n is
/// leave-one-out; counts above n are skipped with a warning.
MultiCv multicv_calibrate(const Dataset& data, const ModelSpec& spec, const TrainDI& trained,
                          std::vector<std::size_t> cluster_counts, std::uint64_t seed, const Parallel& par = {});

/// Evaluates the profile per cell; cells outside the AOA become nodata.
Grid predict_error(const ErrorProfile& profile, const Grid& values, ProfileKind values_kind, const Grid& aoa_grid);

/// Window statistics as points and the fitted curve as a line.
std::string plot_profile(const ErrorProfile& profile);

}  // namespace spcv
