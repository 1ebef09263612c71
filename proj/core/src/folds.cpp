#include "spatialcv/folds.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "spatialcv/clustering.hpp"
#include "spatialcv/ecdf.hpp"
#include "spatialcv/error.hpp"
#include "spatialcv/log.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/rng.hpp"

namespace spcv {

std::vector<std::size_t> FoldAssignment::held_out(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == f) out.push_back(i);
  return out;
}

void FoldAssignment::validate() const {
  require(k >= 1, "folds: k must be positive");
  require(fold_of.size() == n, "folds: fold_of has " + std::to_string(fold_of.size()) + " rows, expected " +
                                   std::to_string(n));
  require(index_train.size() == k, "folds: index_train must list one training side per fold");
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    require(fold_of[i] < k, "folds: row " + std::to_string(i) + " has fold id out of range");
    ++count[fold_of[i]];
  }
  for (std::size_t f = 0; f < k; ++f) {
    require(count[f] > 0, "folds: fold " + std::to_string(f) + " is empty");
    require(!index_train[f].empty(), "folds: fold " + std::to_string(f) + " has an empty training side");
    for (std::size_t r : index_train[f]) {
      require(r < n, "folds: index_train references row " + std::to_string(r) + " out of range");
      require(fold_of[r] != f, "folds: fold " + std::to_string(f) + " trains on its own held-out row " +
                                   std::to_string(r));
    }
  }
}

FoldAssignment FoldAssignment::from_labels(std::vector<std::size_t> fold_of, std::size_t k, std::string method,
                                           std::uint64_t seed) {
  FoldAssignment fa;
  fa.n = fold_of.size();
  fa.k = k;
  fa.fold_of = std::move(fold_of);
  fa.index_train.assign(k, {});
  for (std::size_t f = 0; f < k; ++f)
    for (std::size_t i = 0; i < fa.n; ++i)
      if (fa.fold_of[i] != f) fa.index_train[f].push_back(i);
  fa.diagnostics.method = std::move(method);
  fa.diagnostics.seed = seed;
  fa.validate();
  return fa;
}

std::vector<std::size_t> NNDMExclusion::training_rows(std::size_t i) const {
  std::vector<std::size_t> out;
  const auto& ex = exclude.at(i);
  for (std::size_t j = 0; j < n; ++j)
    if (!std::binary_search(ex.begin(), ex.end(), j)) out.push_back(j);
  return out;
}

void NNDMExclusion::validate() const {
  require(exclude.size() == n, "nndm: exclusion list must have one entry per row");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ex = exclude[i];
    require(std::is_sorted(ex.begin(), ex.end()), "nndm: exclusion sets must be sorted");
    require(std::binary_search(ex.begin(), ex.end(), i),
            "nndm: exclusion set " + std::to_string(i) + " does not contain its own row");
    require(ex.size() < n, "nndm: exclusion set " + std::to_string(i) + " removes every training row");
    require(ex.empty() || ex.back() < n, "nndm: exclusion set references a row out of range");
  }
}

std::size_t scheme_size(const CvScheme& scheme) {
  return std::visit([](const auto& s) { return s.n; }, scheme);
}

std::vector<double> cv_distances(const PointSet& points, const CvScheme& scheme, const Parallel& par) {
  require(scheme_size(scheme) == points.size(), "cv_distances: scheme covers " +
                                                    std::to_string(scheme_size(scheme)) + " rows but there are " +
                                                    std::to_string(points.size()) + " points");
  std::vector<double> out(points.size());
  if (const auto* folds = std::get_if<FoldAssignment>(&scheme)) {
    folds->validate();
    par.for_each_index(folds->k, [&](std::size_t f) {
      const NnIndex index(points.subset(folds->index_train[f]));
      for (std::size_t i = 0; i < points.size(); ++i)
        if (folds->fold_of[i] == f) out[i] = index.nearest(points.coords[i]).distance;
    });
  } else {
    const auto& ex = std::get<NNDMExclusion>(scheme);
    ex.validate();
    const NnIndex index(points);
    par.for_each_index(points.size(), [&](std::size_t i) {
      const auto& set = ex.exclude[i];
      out[i] = index.nearest(points.coords[i], [&](std::size_t j) {
                    return !std::binary_search(set.begin(), set.end(), j);
                  }).distance;
    });
  }
  return out;
}

FoldAssignment random_kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k >= 2, "random_kfold: k must be at least 2");
  require(k <= n, "random_kfold: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "random_kfold"));
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i % k;
  return FoldAssignment::from_labels(std::move(fold_of), k, "random", seed);
}

namespace {

// Maps each row's group label to a block id in [0, k).
std::vector<std::size_t> group_blocks(const std::vector<std::int64_t>& labels, std::size_t k, Rng& rng,
                                      const char* what) {
  std::vector<std::int64_t> groups(labels);
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  require(groups.size() >= k, std::string("spacetime_folds: ") + what + " has " + std::to_string(groups.size()) +
                                  " distinct groups, fewer than k = " + std::to_string(k));
  rng.shuffle(std::span<std::int64_t>(groups));
  std::map<std::int64_t, std::size_t> block;
  for (std::size_t pos = 0; pos < groups.size(); ++pos) block[groups[pos]] = pos % k;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = block[labels[i]];
  return out;
}

}  // namespace

FoldAssignment spacetime_folds(std::size_t n, const std::optional<std::vector<std::int64_t>>& spacevar,
                               const std::optional<std::vector<std::int64_t>>& timevar, std::size_t k,
                               std::uint64_t seed) {
  require(spacevar || timevar, "spacetime_folds: need a space and/or a time variable");
  require(k >= 2, "spacetime_folds: k must be at least 2");
  if (spacevar) require(spacevar->size() == n, "spacetime_folds: spacevar length differs from n");
  if (timevar) require(timevar->size() == n, "spacetime_folds: timevar length differs from n");

  Rng rng(derive_seed(seed, "spacetime_folds"));
  std::optional<std::vector<std::size_t>> sblock, tblock;
  if (spacevar) sblock = group_blocks(*spacevar, k, rng, "spacevar");
  if (timevar) tblock = group_blocks(*timevar, k, rng, "timevar");

  if (!(sblock && tblock)) {
    auto fa = FoldAssignment::from_labels(sblock ? *sblock : *tblock, k, "spacetime", seed);
    return fa;
  }

  require(k >= 3, "spacetime_folds: blocking on both space and time needs k >= 3");
  // Cell (s, t) goes to fold s when (t - s) mod k < ceil(k/2), else to fold t.
  // Fold f then only touches space blocks {f .. f+k-h} and time blocks
  // {f .. f+h-1} (mod k), leaving some blocks free on both axes.
  const std::size_t h = (k + 1) / 2;
  FoldAssignment fa;
  fa.n = n;
  fa.k = k;
  fa.fold_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = (*sblock)[i], t = (*tblock)[i];
    const std::size_t d = (t + k - s) % k;
    fa.fold_of[i] = d < h ? s : t;
  }
  fa.index_train.assign(k, {});
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<bool> s_used(k, false), t_used(k, false);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (fa.fold_of[i] == f) {
        s_used[(*sblock)[i]] = true;
        t_used[(*tblock)[i]] = true;
        any = true;
      }
    if (!any) throw DataError("spacetime_folds: no rows fall into fold " + std::to_string(f));
    for (std::size_t i = 0; i < n; ++i)
      if (!s_used[(*sblock)[i]] && !t_used[(*tblock)[i]]) fa.index_train[f].push_back(i);
    if (fa.index_train[f].empty())
      throw DataError("spacetime_folds: fold " + std::to_string(f) +
                      " leaves no training rows that differ in both space and time");
  }
  fa.diagnostics.method = "spacetime";
  fa.diagnostics.seed = seed;
  fa.validate();
  return fa;
}

NNDMExclusion nndm(const PointSet& tpoints, const PointSet& predpoints, double min_train_fraction,
                   const Parallel& par) {
  const std::size_t n = tpoints.size();
  require(n >= 2, "nndm: need at least 2 training points");
  require(!predpoints.empty(), "nndm: prediction points are empty");
  require(min_train_fraction >= 0.0 && min_train_fraction < 1.0, "nndm: min_train_fraction must be in [0, 1)");

  const std::vector<double> pred_nnd = nnd_between(predpoints, tpoints, par);
  const Ecdf g_pred(pred_nnd);
  const double phi = g_pred.max();

  // Per test point: all other rows ordered by (distance, index). Exclusions
  // always remove the current nearest neighbours, so every exclusion set is
  // {i} plus a prefix of this order.
  std::vector<std::vector<std::pair<double, std::size_t>>> order(n);
  double max_pair = 0.0;
  par.for_each_index(n, [&](std::size_t i) {
    auto& o = order[i];
    o.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) o.emplace_back(distance(tpoints.coords[i], tpoints.coords[j], tpoints.crs), j);
    std::sort(o.begin(), o.end());
  });
  for (const auto& o : order) max_pair = std::max(max_pair, o.back().first);
  if (max_pair <= 0.0) throw DataError("nndm: all training points are identical");

  std::vector<std::size_t> ptr(n, 0);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = order[i][0].first;

  const double min_train = min_train_fraction * static_cast<double>(n);
  auto g_cv = [&](double r) {
    return static_cast<double>(std::count_if(d.begin(), d.end(), [r](double v) { return v <= r; })) /
           static_cast<double>(n);
  };
  // Number of nearest neighbours tied at the current distance of row j.
  auto ties = [&](std::size_t j) {
    std::size_t t = 0;
    while (ptr[j] + t < n - 1 && order[j][ptr[j] + t].first == d[j]) ++t;
    return t;
  };

  double r = *std::min_element(d.begin(), d.end());
  while (r <= phi) {
    while (g_cv(r) > g_pred(r)) {
      std::size_t pick = n;
      std::size_t pick_ties = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (d[j] != r) continue;
        const std::size_t t = ties(j);
        const double remaining = static_cast<double>(n - 1 - ptr[j] - t);
        if (ptr[j] + t < n - 1 && remaining >= min_train) {
          pick = j;
          pick_ties = t;
          break;
        }
      }
      if (pick == n) break;
      ptr[pick] += pick_ties;
      d[pick] = order[pick][ptr[pick]].first;
    }
    double next = std::numeric_limits<double>::infinity();
    for (double v : d)
      if (v > r) next = std::min(next, v);
    if (!std::isfinite(next)) break;
    r = next;
  }

  NNDMExclusion ex;
  ex.n = n;
  ex.exclude.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& set = ex.exclude[i];
    set.push_back(i);
    for (std::size_t m = 0; m < ptr[i]; ++m) set.push_back(order[i][m].second);
    std::sort(set.begin(), set.end());
  }

  // The greedy sweep can overshoot the prediction ECDF; never return a
  // scheme that matches worse than plain LOO.
  const double w_loo = wasserstein1(Ecdf(nnd_within(tpoints, par)), g_pred);
  const double w_cv = wasserstein1(Ecdf(d), g_pred);
  if (w_cv > w_loo) {
    warn("nndm: exclusions did not improve on leave-one-out; returning plain LOO");
    for (std::size_t i = 0; i < n; ++i) ex.exclude[i] = {i};
  }
  ex.validate();
  return ex;
}

double scheme_wasserstein(const PointSet& tpoints, const std::vector<double>& pred_nnd, const CvScheme& scheme,
                          const Parallel& par) {
  return wasserstein1(Ecdf(cv_distances(tpoints, scheme, par)), Ecdf(pred_nnd));
}

std::vector<std::size_t> merge_clusters(const std::vector<std::size_t>& cluster_of, std::size_t k) {
  std::size_t q = 0;
  for (std::size_t c : cluster_of) q = std::max(q, c + 1);
  require(q >= k, "merge_clusters: fewer clusters than folds");
  std::vector<std::size_t> size(q, 0), first(q, cluster_of.size());
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    ++size[cluster_of[i]];
    first[cluster_of[i]] = std::min(first[cluster_of[i]], i);
  }
  std::vector<std::size_t> clusters(q);
  std::iota(clusters.begin(), clusters.end(), std::size_t{0});
  std::sort(clusters.begin(), clusters.end(), [&](std::size_t a, std::size_t b) {
    return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
  });
  std::vector<std::size_t> fold_size(k, 0), fold_of_cluster(q, 0);
  for (std::size_t c : clusters) {
    const std::size_t f =
        static_cast<std::size_t>(std::min_element(fold_size.begin(), fold_size.end()) - fold_size.begin());
    fold_of_cluster[c] = f;
    fold_size[f] += size[c];
  }
  std::vector<std::size_t> out(cluster_of.size());
  for (std::size_t i = 0; i < cluster_of.size(); ++i) out[i] = fold_of_cluster[cluster_of[i]];
  return out;
}

KnndmResult knndm_search(const PointSet& tpoints, const PointSet& domain_sample, std::size_t k,
                         std::uint64_t seed, const Parallel& par) {
  const std::size_t n = tpoints.size();
  require(k >= 2 && k <= n, "knndm: k = " + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  require(!domain_sample.empty(), "knndm: domain sample is empty");

  const std::vector<double> pred_nnd = nnd_between(domain_sample, tpoints, par);
  const Ecdf g_pred(pred_nnd);
  const auto merges = complete_linkage(pairwise_distances(tpoints));

  const std::size_t q_max = std::min(n, 10 * k);
  std::vector<FoldAssignment> candidates;
  std::vector<KnndmCandidate> ladder;
  candidates.push_back(random_kfold(n, k, seed));
  ladder.push_back({"random", 0, 0.0});
  for (std::size_t q = k; q <= q_max; ++q) {
    candidates.push_back(FoldAssignment::from_labels(merge_clusters(cut_tree(merges, n, q), k), k, "knndm", seed));
    ladder.push_back({"clusters:" + std::to_string(q), q, 0.0});
  }

  par.for_each_index(candidates.size(), [&](std::size_t c) {
    ladder[c].W = wasserstein1(Ecdf(cv_distances(tpoints, candidates[c])), g_pred);
  });

  std::size_t best = 0;
  for (std::size_t c = 1; c < ladder.size(); ++c)
    if (ladder[c].W < ladder[best].W) best = c;

  KnndmResult res{std::move(candidates[best]), std::move(ladder)};
  res.folds.diagnostics.method = "knndm";
  res.folds.diagnostics.seed = seed;
  res.folds.diagnostics.W = res.ladder[best].W;
  return res;
}

}  // namespace spcv
