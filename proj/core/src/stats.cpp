#include "spatialcv/stats.hpp"

#include <algorithm>
#include <cmath>

#include "spatialcv/error.hpp"

namespace spcv {

double mean(std::span<const double> v) {
  require(!v.empty(), "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile7(std::span<const double> v, double prob) {
  require(!v.empty(), "quantile of an empty sample");
  require(prob >= 0.0 && prob <= 1.0, "quantile probability must be in [0, 1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double h = static_cast<double>(s.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double upper_whisker(std::span<const double> v) {
  const double q25 = quantile7(v, 0.25), q75 = quantile7(v, 0.75);
  return q75 + 1.5 * (q75 - q25);
}

ColumnScaling ColumnScaling::fit(const Matrix& x) {
  ColumnScaling s;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto col = x.column(c);
    s.means.push_back(mean(col));
    s.sds.push_back(sample_sd(col));
  }
  return s;
}

Matrix ColumnScaling::apply(const Matrix& x) const {
  require(x.cols() == means.size(), "ColumnScaling: column count mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double centered = x(r, c) - means[c];
      out(r, c) = sds[c] > 0.0 ? centered / sds[c] : centered;
    }
  return out;
}

}  // namespace spcv
