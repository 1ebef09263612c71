#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spatialcv/matrix.hpp"

namespace spcv {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(std::span<const double> v);

/// Quantile by linear interpolation between order statistics (R type 7).
double quantile7(std::span<const double> v, double prob);

/// Upper boxplot whisker: Q75 + 1.5 * (Q75 - Q25), type-7 quantiles.
double upper_whisker(std::span<const double> v);

/// Per-column mean and sample sd.
struct ColumnScaling {
  std::vector<double> means;
  std::vector<double> sds;

  static ColumnScaling fit(const Matrix& x);
  /// (x - mean) / sd per column; columns with sd == 0 are only centered.
  Matrix apply(const Matrix& x) const;
};

}  // namespace spcv
