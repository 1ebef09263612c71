#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spatialcv/matrix.hpp"
#include "spatialcv/parallel.hpp"

namespace spcv {

struct RFParams {
  std::size_t num_trees = 100;
  std::size_t mtry = 0;  // 0 = floor(sqrt(p)), at least 1
  std::size_t min_node_size = 5;
  std::uint64_t seed = 0;
  bool permutation_importance = true;

  std::size_t resolved_mtry(std::size_t p) const;
  void validate(std::size_t p) const;
  friend bool operator==(const RFParams&, const RFParams&) = default;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // rows with x[feature] <= threshold go left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;         // leaf mean
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  template <class Row>
  double predict(const Row& row) const {
    std::size_t id = 0;
    while (nodes[id].feature >= 0) {
      const TreeNode& nd = nodes[id];
      id = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[id].value;
  }
};

/// Regression random forest: CART trees on bootstrap samples (n rows with
/// replacement), splits chosen by exhaustive midpoint scan over `mtry`
/// randomly drawn predictors, leaf means, averaged over trees. Each tree draws
/// from its own stream derived from the master seed, so fits are identical for
/// any thread count.
class RandomForest {
 public:
  static RandomForest fit(const Matrix& x, std::span<const double> y, const RFParams& params,
                          const Parallel& par = {});

  double predict(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;

  /// Out-of-bag permutation importance (increase in OOB MSE, averaged over
  /// trees, floored at 0). All zeros when disabled in the params.
  const std::vector<double>& importance() const { return importance_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::size_t num_features() const { return num_features_; }

  static RandomForest from_parts(std::vector<RegressionTree> trees, std::vector<double> importance,
                                 std::size_t num_features);

 private:
  std::vector<RegressionTree> trees_;
  std::vector<double> importance_;
  std::size_t num_features_ = 0;
};

}  // namespace spcv
