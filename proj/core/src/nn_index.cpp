#include "spatialcv/nn_index.hpp"

#include <numeric>
#include <string>

#include "geo_detail.hpp"
#include "spatialcv/error.hpp"

namespace spcv {

NnIndex::NnIndex(const Matrix& reference)
    : n_(reference.rows()), dim_(reference.cols()), embed_(reference.data()) {
  require(dim_ >= 1 || n_ == 0, "NnIndex: reference rows have zero dimensions");
  build();
}

NnIndex::NnIndex(const PointSet& points) : is_points_(true), n_(points.size()) {
  points.validate();
  geographic_ = points.crs == CrsKind::geographic;
  if (geographic_) {
    dim_ = 3;
    embed_.resize(n_ * 3);
    lon_.resize(n_);
    lat_.resize(n_);
    cos_lat_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto q = prepare_point(points.coords[i]);
      lon_[i] = q.lon;
      lat_[i] = q.lat;
      cos_lat_[i] = q.cos_lat;
      std::copy(q.embed.begin(), q.embed.end(), embed_.begin() + 3 * i);
    }
  } else {
    dim_ = 2;
    embed_.resize(n_ * 2);
    for (std::size_t i = 0; i < n_; ++i) {
      embed_[2 * i] = points.coords[i].x;
      embed_[2 * i + 1] = points.coords[i].y;
    }
  }
  build();
}

void NnIndex::build() {
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.clear();
  if (n_ == 0) return;
  nodes_.reserve(2 * (n_ / kLeafSize + 1));
  build_node(0, n_);
}

std::size_t NnIndex::build_node(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end, 0, 0, 0, 0.0});
  if (end - begin <= kLeafSize) return id;

  // Split on the dimension of widest spread at the median.
  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = embed_[order_[k] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all identical: keep as a leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto key = [&](std::size_t i) { return embed_[i * dim_ + best_dim]; };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  const double split = key(order_[mid]);

  const std::size_t left = build_node(begin, mid);
  const std::size_t right = build_node(mid, end);
  Node& node = nodes_[id];
  node.left = left;
  node.right = right;
  node.dim = best_dim;
  node.split = split;
  return id;
}

NnIndex::Prepared NnIndex::prepare_point(Point p) const {
  Prepared q;
  if (geographic_) {
    if (!(p.x >= -180.0 && p.x <= 180.0 && p.y >= -90.0 && p.y <= 90.0))
      throw std::domain_error("geographic coordinate out of range: (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) + ")");
    q.lon = detail::to_radians(p.x);
    q.lat = detail::to_radians(p.y);
    q.cos_lat = detail::cos_lat(q.lat);
    q.embed = {q.cos_lat * std::cos(q.lon), q.cos_lat * std::sin(q.lon), std::sin(q.lat)};
  } else {
    q.embed = {p.x, p.y};
  }
  return q;
}

NnIndex::Prepared NnIndex::prepare_row(std::span<const double> row) const {
  require(!is_points_, "NnIndex: this index was built over points; query with a Point");
  require(row.size() == dim_, "NnIndex: query has " + std::to_string(row.size()) +
                                  " dimensions, reference has " + std::to_string(dim_));
  Prepared q;
  q.embed.assign(row.begin(), row.end());
  return q;
}

double NnIndex::true_distance(const Prepared& q, std::size_t i) const {
  if (geographic_)
    return detail::haversine_rad(q.lon, q.lat, q.cos_lat, lon_[i], lat_[i], cos_lat_[i]);
  const double* r = embed_.data() + i * dim_;
  if (dim_ == 2) return detail::euclid2(q.embed[0] - r[0], q.embed[1] - r[1]);
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = q.embed[d] - r[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double NnIndex::lower_bound(double gap) const {
  if (geographic_) return 2.0 * kEarthRadius * std::asin(std::min(1.0, gap * 0.5)) * (1.0 - 1e-9);
  return gap * (1.0 - 1e-12);
}

std::vector<NnIndex::Hit> NnIndex::k_nearest(std::span<const double> query, std::size_t k) const {
  auto q = prepare_row(query);
  std::vector<Hit> best;
  if (k == 0 || n_ == 0) return best;
  best.reserve(k + 1);
  search_k(0, q, k, best);
  return best;
}

void NnIndex::search_k(std::size_t id, const Prepared& q, std::size_t k, std::vector<Hit>& best) const {
  const Node& node = nodes_[id];
  if (node.leaf()) {
    for (std::size_t pos = node.begin; pos < node.end; ++pos) {
      const std::size_t i = order_[pos];
      const double d = true_distance(q, i);
      if (best.size() == k && !better(d, i, best.back())) continue;
      auto it = std::upper_bound(best.begin(), best.end(), Hit{i, d}, [](const Hit& a, const Hit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
      });
      best.insert(it, Hit{i, d});
      if (best.size() > k) best.pop_back();
    }
    return;
  }
  const double gap = q.embed[node.dim] - node.split;
  const std::size_t first = gap <= 0.0 ? node.left : node.right;
  const std::size_t second = gap <= 0.0 ? node.right : node.left;
  search_k(first, q, k, best);
  if (best.size() < k || lower_bound(std::abs(gap)) <= best.back().distance) search_k(second, q, k, best);
}

}  // namespace spcv
