#include "spatialcv/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "spatialcv/error.hpp"
#include "spatialcv/rng.hpp"

namespace spcv {

std::vector<Merge> complete_linkage(const Matrix& distances) {
  const std::size_t n = distances.rows();
  require(distances.cols() == n, "complete_linkage: distance matrix must be square");
  std::vector<Merge> merges;
  if (n < 2) return merges;

  // Working copy of inter-cluster distances, indexed by representative slot.
  Matrix d = distances;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> label(n);  // current cluster id held by each slot
  std::iota(label.begin(), label.end(), std::size_t{0});
  std::vector<std::size_t> chain;
  chain.reserve(n);
  merges.reserve(n - 1);

  std::size_t remaining = n;
  while (remaining > 1) {
    if (chain.empty()) {
      for (std::size_t i = 0; i < n; ++i)
        if (active[i]) {
          chain.push_back(i);
          break;
        }
    }
    for (;;) {
      const std::size_t a = chain.back();
      const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : n;
      // Nearest active neighbour; prefer the chain predecessor on ties so the
      // chain terminates.
      std::size_t best = prev;
      double best_d = prev < n ? d(a, prev) : std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (!active[j] || j == a) continue;
        if (d(a, j) < best_d) {
          best_d = d(a, j);
          best = j;
        }
      }
      if (best == prev) {
        chain.pop_back();
        chain.pop_back();
        const std::size_t lo = std::min(a, prev), hi = std::max(a, prev);
        merges.push_back({std::min(label[lo], label[hi]), std::max(label[lo], label[hi]), best_d});
        // Complete linkage (Lance-Williams): d(new, k) = max(d(lo, k), d(hi, k)).
        for (std::size_t k = 0; k < n; ++k) {
          if (!active[k] || k == lo || k == hi) continue;
          const double v = std::max(d(lo, k), d(hi, k));
          d(lo, k) = v;
          d(k, lo) = v;
        }
        active[hi] = false;
        label[lo] = n + merges.size() - 1;
        --remaining;
        break;
      }
      chain.push_back(best);
    }
  }

  // Reorder by height and relabel so that cluster ids follow the sorted order.
  std::vector<std::size_t> order(merges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return merges[x].height < merges[y].height; });
  std::vector<std::size_t> new_id(merges.size());
  for (std::size_t s = 0; s < order.size(); ++s) new_id[order[s]] = n + s;
  std::vector<Merge> sorted;
  sorted.reserve(merges.size());
  for (std::size_t s : order) {
    Merge m = merges[s];
    if (m.a >= n) m.a = new_id[m.a - n];
    if (m.b >= n) m.b = new_id[m.b - n];
    if (m.a > m.b) std::swap(m.a, m.b);
    sorted.push_back(m);
  }
  return sorted;
}

std::vector<std::size_t> cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t q) {
  require(q >= 1 && q <= n, "cut_tree: cluster count " + std::to_string(q) + " outside [1, " +
                                std::to_string(n) + "]");
  require(merges.size() + 1 == n || n == 0, "cut_tree: merge list does not describe n leaves");
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t s = 0; s + q < n; ++s) {
    parent[find(merges[s].a)] = n + s;
    parent[find(merges[s].b)] = n + s;
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(2 * n, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == std::numeric_limits<std::size_t>::max()) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

Matrix pairwise_distances(const PointSet& points) {
  const std::size_t n = points.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = distance(points.coords[i], points.coords[j], points.crs);
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

KMeansResult kmeans_once(const Matrix& x, std::size_t k, Rng& rng, std::size_t max_iter) {
  const std::size_t n = x.rows(), p = x.cols();
  KMeansResult res;
  res.centers = Matrix(k, p);
  res.labels.assign(n, 0);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.below(n);
  std::copy(x.row(first).begin(), x.row(first).end(), res.centers.row(0).begin());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(x.row(i), res.centers.row(c - 1)));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= d2[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    std::copy(x.row(pick).begin(), x.row(pick).end(), res.centers.row(c).begin());
  }

  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double v = sq_dist(x.row(i), res.centers.row(c));
        if (v < best_d) {
          best_d = v;
          best = c;
        }
      }
      if (res.labels[i] != best) changed = true;
      res.labels[i] = best;
    }
    // Reseed empty clusters from the point farthest from its center.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t l : res.labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.labels[i]] <= 1) continue;
        const double v = sq_dist(x.row(i), res.centers.row(res.labels[i]));
        if (v > far_d) {
          far_d = v;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      --counts[res.labels[far]];
      res.labels[far] = c;
      counts[c] = 1;
      changed = true;
    }
    // Update centers.
    std::fill(res.centers.data().begin(), res.centers.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto ctr = res.centers.row(res.labels[i]);
      auto xi = x.row(i);
      for (std::size_t d = 0; d < p; ++d) ctr[d] += xi[d];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (double& v : res.centers.row(c)) v /= static_cast<double>(counts[c]);
    if (!changed) break;
  }
  res.sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) res.sse += sq_dist(x.row(i), res.centers.row(res.labels[i]));
  return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& rows, std::size_t k, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iter) {
  require(k >= 1 && k <= rows.rows(), "kmeans: k must be in [1, n]");
  require(restarts >= 1, "kmeans: need at least one restart");
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, "kmeans", r));
    KMeansResult res = kmeans_once(rows, k, rng, max_iter);
    if (!have || res.sse < best.sse) {
      best = std::move(res);
      have = true;
    }
  }
  // Canonical label order: by smallest member index.
  std::vector<std::size_t> remap(k, k);
  std::size_t next = 0;
  for (std::size_t& l : best.labels) {
    if (remap[l] == k) remap[l] = next++;
    l = remap[l];
  }
  Matrix centers(next, rows.cols());
  for (std::size_t c = 0; c < k; ++c)
    if (remap[c] < next)
      std::copy(best.centers.row(c).begin(), best.centers.row(c).end(), centers.row(remap[c]).begin());
  best.centers = std::move(centers);
  return best;
}

}  // namespace spcv
