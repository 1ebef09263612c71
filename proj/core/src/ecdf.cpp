#include "spatialcv/ecdf.hpp"

#include <algorithm>
#include <cmath>

#include "spatialcv/error.hpp"

namespace spcv {

Ecdf::Ecdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  require(!sorted_.empty(), "ECDF: empty sample");
  for (double v : sorted_)
    require(std::isfinite(v) && v >= 0.0, "ECDF: values must be finite and nonnegative");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double r) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), r) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double wasserstein1(const Ecdf& f, const Ecdf& g) {
  const auto& a = f.sorted_values();
  const auto& b = g.sorted_values();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a.front(), b.front());
  double fa = 0.0, fb = 0.0, w = 0.0;
  while (i < a.size() || j < b.size()) {
    double next;
    if (i == a.size()) next = b[j];
    else if (j == b.size()) next = a[i];
    else next = std::min(a[i], b[j]);
    w += std::abs(fa - fb) * (next - prev);
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
    fa = static_cast<double>(i) / na;
    fb = static_cast<double>(j) / nb;
    prev = next;
  }
  return w;
}

}  // namespace spcv
