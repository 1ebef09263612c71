#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spcv {

/// Empirical CDF of a sample of nonnegative distances.
/// F(r) = (#values <= r) / n, right-continuous.
class Ecdf {
 public:
  /// Throws PreconditionError for empty, non-finite or negative input.
  explicit Ecdf(std::span<const double> values);

  double operator()(double r) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

inline Ecdf ecdf_of(std::span<const double> values) { return Ecdf(values); }

/// Wasserstein-1 distance between two ECDFs: the exact integral of |F - G|
/// over the merged breakpoints of both step functions.
double wasserstein1(const Ecdf& f, const Ecdf& g);

}  // namespace spcv
