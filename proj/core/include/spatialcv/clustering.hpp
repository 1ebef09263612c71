#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spatialcv/geom.hpp"
#include "spatialcv/matrix.hpp"

namespace spcv {

/// One agglomeration step: clusters `a` and `b` (ids as in scipy-style
/// linkage: < n are leaves, n + s is the cluster created at step s) merged at
/// `height`.
struct Merge {
  std::size_t a = 0, b = 0;
  double height = 0.0;
};

/// Complete-linkage agglomerative clustering of a dense symmetric distance
/// matrix (n x n). Uses the nearest-neighbour-chain algorithm; merges are
/// returned sorted by height (stable), n - 1 in total.
std::vector<Merge> complete_linkage(const Matrix& distances);

/// Labels in [0, q) obtained by cutting a dendrogram into q clusters. Labels are
/// numbered by the smallest member index.
std::vector<std::size_t> cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t q);

/// Pairwise distance matrix of a point set using distance().
Matrix pairwise_distances(const PointSet& points);

struct KMeansResult {
  std::vector<std::size_t> labels;
  Matrix centers;
  double sse = 0.0;
};

/// Lloyd's k-means with k-means++ seeding; `restarts` seeded restarts, best
/// within-cluster SSE kept. Empty clusters are reseeded from the point
/// farthest from its current center.
KMeansResult kmeans(const Matrix& rows, std::size_t k, std::uint64_t seed, std::size_t restarts = 25,
                    std::size_t max_iter = 100);

}  // namespace spcv
