#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "spatialcv/geom.hpp"
#include "spatialcv/matrix.hpp"

namespace spcv {

/// Exact nearest-neighbour index (kd-tree) over either Euclidean feature rows
/// or a PointSet. Geographic point sets are embedded on the unit sphere for
/// pruning while all reported distances are true haversine distances, so the
/// answers equal an exhaustive scan. Ties break toward the lowest index.
class NnIndex {
 public:
  struct Hit {
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double distance = std::numeric_limits<double>::infinity();
    bool found() const { return index != std::numeric_limits<std::size_t>::max(); }
  };

  /// Euclidean index over the rows of `reference`.
  explicit NnIndex(const Matrix& reference);
  /// Index over sample locations; distances follow `points.crs`.
  explicit NnIndex(const PointSet& points);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

  /// Nearest reference row to a query row (Euclidean index only).
  Hit nearest(std::span<const double> query) const {
    return nearest(query, [](std::size_t) { return true; });
  }
  template <class Accept>
  Hit nearest(std::span<const double> query, Accept&& accept) const;

  /// Nearest reference location to a query point (PointSet index only).
  Hit nearest(Point query) const {
    return nearest(query, [](std::size_t) { return true; });
  }
  template <class Accept>
  Hit nearest(Point query, Accept&& accept) const {
    auto q = prepare_point(query);
    return nearest_prepared(q, accept);
  }

  /// The k nearest rows ordered by (distance, index).
  std::vector<Hit> k_nearest(std::span<const double> query, std::size_t k) const;

  /// Calls visit(index, distance) for every reference row within `radius`
  /// (inclusive). Rows slightly beyond the radius may be reported as well;
  /// callers apply their own exact acceptance test.
  template <class Visit>
  void for_each_within(std::span<const double> query, double radius, Visit&& visit) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range into order_
    std::size_t left = 0, right = 0;  // child node ids; 0 = none (root is 0)
    std::size_t dim = 0;
    double split = 0.0;
    bool leaf() const { return left == 0 && right == 0; }
  };

  // Query as stored in embedding space plus (for geographic) lon/lat radians.
  struct Prepared {
    std::vector<double> embed;
    double lon = 0.0, lat = 0.0, cos_lat = 0.0;
  };

  void build();
  std::size_t build_node(std::size_t begin, std::size_t end);
  Prepared prepare_point(Point p) const;
  Prepared prepare_row(std::span<const double> row) const;
  double true_distance(const Prepared& q, std::size_t i) const;
  // Lower bound on the true distance given a gap in embedding space.
  double lower_bound(double gap) const;

  template <class Accept>
  Hit nearest_prepared(const Prepared& q, Accept& accept) const;
  template <class Accept>
  void search(std::size_t node, const Prepared& q, Accept& accept, Hit& best) const;
  void search_k(std::size_t node, const Prepared& q, std::size_t k, std::vector<Hit>& best) const;
  template <class Visit>
  void search_radius(std::size_t node, const Prepared& q, double radius, Visit& visit) const;

  bool geographic_ = false;
  bool is_points_ = false;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> embed_;  // n_ x dim_, row-major
  std::vector<double> lon_, lat_, cos_lat_;  // radians, geographic only
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;

  static constexpr std::size_t kLeafSize = 12;
};

inline bool better(double d, std::size_t i, const NnIndex::Hit& best) {
  return d < best.distance || (d == best.distance && i < best.index);
}

template <class Accept>
NnIndex::Hit NnIndex::nearest(std::span<const double> query, Accept&& accept) const {
  auto q = prepare_row(query);
  return nearest_prepared(q, accept);
}

template <class Accept>
NnIndex::Hit NnIndex::nearest_prepared(const Prepared& q, Accept& accept) const {
  Hit best;
  if (n_ > 0) search(0, q, accept, best);
  return best;
}

template <class Accept>
void NnIndex::search(std::size_t id, const Prepared& q, Accept& accept, Hit& best) const {
  const Node& node = nodes_[id];
  if (node.leaf()) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t i = order_[k];
      if (!accept(i)) continue;
      const double d = true_distance(q, i);
      if (better(d, i, best)) best = {i, d};
    }
    return;
  }
  const double gap = q.embed[node.dim] - node.split;
  const std::size_t first = gap <= 0.0 ? node.left : node.right;
  const std::size_t second = gap <= 0.0 ? node.right : node.left;
  search(first, q, accept, best);
  if (lower_bound(std::abs(gap)) <= best.distance) search(second, q, accept, best);
}

template <class Visit>
void NnIndex::for_each_within(std::span<const double> query, double radius, Visit&& visit) const {
  auto q = prepare_row(query);
  if (n_ > 0) search_radius(0, q, radius, visit);
}

template <class Visit>
void NnIndex::search_radius(std::size_t id, const Prepared& q, double radius, Visit& visit) const {
  const Node& node = nodes_[id];
  if (node.leaf()) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t i = order_[k];
      const double d = true_distance(q, i);
      if (d <= radius * (1.0 + 1e-12) + 1e-300) visit(i, d);
    }
    return;
  }
  const double gap = q.embed[node.dim] - node.split;
  const std::size_t first = gap <= 0.0 ? node.left : node.right;
  const std::size_t second = gap <= 0.0 ? node.right : node.left;
  search_radius(first, q, radius, visit);
  if (lower_bound(std::abs(gap)) <= radius * (1.0 + 1e-12)) search_radius(second, q, radius, visit);
}

}  // namespace spcv
