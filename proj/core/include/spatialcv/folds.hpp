#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spatialcv/geom.hpp"
#include "spatialcv/parallel.hpp"

namespace spcv {

/// Assignment of training rows to k cross-validation folds.
///
/// `index_train[f]` lists the rows trained on when fold f is held out. For
/// plain partitions it is the complement of fold f; space-time folds may drop
/// further rows that share a space or time group with the held-out rows.
struct FoldAssignment {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;
  std::vector<std::vector<std::size_t>> index_train;

  struct Diagnostics {
    std::optional<double> W;  // Wasserstein-1 vs the prediction NND ECDF
    std::string method;
    std::uint64_t seed = 0;
  } diagnostics;

  /// Rows held out in fold f.
  std::vector<std::size_t> held_out(std::size_t f) const;
  /// Throws PreconditionError if any partition invariant is broken.
  void validate() const;

  /// Builds a partition whose training sides are the fold complements.
  static FoldAssignment from_labels(std::vector<std::size_t> fold_of, std::size_t k, std::string method,
                                    std::uint64_t seed);
};

/// Leave-one-out exclusion sets: when row i is the test point, every row in
/// exclude[i] (which always contains i) is removed from the training side.
struct NNDMExclusion {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> exclude;  // each sorted ascending

  std::vector<std::size_t> training_rows(std::size_t i) const;
  void validate() const;
};

using CvScheme = std::variant<FoldAssignment, NNDMExclusion>;

std::size_t scheme_size(const CvScheme& scheme);

/// For each point, the distance to its nearest point on the training side of
/// its own fold (or LOO iteration).
std::vector<double> cv_distances(const PointSet& points, const CvScheme& scheme, const Parallel& par = {});

/// Random k-fold: rows shuffled with `seed` and dealt round-robin.
FoldAssignment random_kfold(std::size_t n, std::size_t k, std::uint64_t seed);

/// Blocked folds from group labels. Distinct space (and/or time) groups are
/// shuffled and dealt into k blocks. With a single variable, fold = block.
/// With both, the (space block, time block) cell decides the fold so that
/// every fold leaves rows that differ from all its held-out rows in both the
/// space and the time group; this needs k >= 3.
FoldAssignment spacetime_folds(std::size_t n, const std::optional<std::vector<std::int64_t>>& spacevar,
                               const std::optional<std::vector<std::int64_t>>& timevar, std::size_t k,
                               std::uint64_t seed);

/// Nearest neighbour distance matching LOO CV. Greedily excludes nearest
/// neighbours of LOO test points, sweeping the radius upward, wherever the CV
/// NND ECDF lies above the prediction NND ECDF.
NNDMExclusion nndm(const PointSet& tpoints, const PointSet& predpoints, double min_train_fraction = 0.5,
                   const Parallel& par = {});

/// Wasserstein-1 between the CV and prediction NND ECDFs of a scheme.
double scheme_wasserstein(const PointSet& tpoints, const std::vector<double>& pred_nnd, const CvScheme& scheme,
                          const Parallel& par = {});

struct KnndmCandidate {
  std::string label;   // "random" or "clusters:<q>"
  std::size_t clusters = 0;
  double W = 0.0;
};

struct KnndmResult {
  FoldAssignment folds;
  std::vector<KnndmCandidate> ladder;  // every evaluated candidate, in ladder order
};

/// k-fold NNDM: evaluates random k-fold plus complete-linkage clusterings cut
/// at q = k .. min(n, 10k) groups, each merged into k size-balanced folds, and
/// returns the candidate with minimal Wasserstein-1 (first in ladder order on ties).
KnndmResult knndm_search(const PointSet& tpoints, const PointSet& domain_sample, std::size_t k,
                         std::uint64_t seed, const Parallel& par = {});

inline FoldAssignment knndm(const PointSet& tpoints, const PointSet& domain_sample, std::size_t k,
                            std::uint64_t seed, const Parallel& par = {}) {
  return knndm_search(tpoints, domain_sample, k, seed, par).folds;
}

/// Greedy size-balanced merge of cluster labels into k folds: clusters are
/// taken largest first (ties: smallest first member) and each is assigned to
/// the currently smallest fold (ties: lowest fold id).
std::vector<std::size_t> merge_clusters(const std::vector<std::size_t>& cluster_of, std::size_t k);

}  // namespace spcv
