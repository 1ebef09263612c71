#include "spatialcv/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spatialcv/error.hpp"
#include "spatialcv/rng.hpp"

namespace spcv {

std::size_t RFParams::resolved_mtry(std::size_t p) const {
  if (mtry > 0) return mtry;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
}

void RFParams::validate(std::size_t p) const {
  require(num_trees >= 1, "random forest: num_trees must be at least 1");
  require(min_node_size >= 1, "random forest: min_node_size must be at least 1");
  const std::size_t m = resolved_mtry(p);
  require(m >= 1 && m <= p, "random forest: mtry = " + std::to_string(m) + " outside [1, " + std::to_string(p) + "]");
}

namespace {

struct Frame {
  std::size_t n = 0, p = 0;
  std::vector<double> cols;  // column-major
  double at(std::size_t row, std::size_t col) const { return cols[col * n + row]; }
};

Frame to_frame(const Matrix& x) {
  Frame f;
  f.n = x.rows();
  f.p = x.cols();
  f.cols.resize(f.n * f.p);
  for (std::size_t r = 0; r < f.n; ++r)
    for (std::size_t c = 0; c < f.p; ++c) f.cols[c * f.n + r] = x(r, c);
  return f;
}

struct Task {
  std::uint32_t node;
  std::size_t begin, end;
};

RegressionTree grow_tree(const Frame& x, std::span<const double> y, std::vector<std::uint32_t>& sample,
                         std::size_t mtry, std::size_t min_node_size, Rng& rng) {
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<Task> stack{{0, 0, sample.size()}};
  std::vector<std::size_t> features(x.p);
  std::vector<std::pair<double, double>> buf;
  buf.reserve(sample.size());

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const std::size_t count = task.end - task.begin;
    double sum = 0.0;
    bool pure = true;
    const double first_y = y[sample[task.begin]];
    for (std::size_t k = task.begin; k < task.end; ++k) {
      const double v = y[sample[k]];
      sum += v;
      pure = pure && v == first_y;
    }
    tree.nodes[task.node].value = sum / static_cast<double>(count);
    if (count <= min_node_size || pure) continue;

    std::iota(features.begin(), features.end(), std::size_t{0});
    const double parent_score = sum * sum / static_cast<double>(count);
    double best_score = parent_score;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t m = 0; m < mtry; ++m) {
      std::swap(features[m], features[m + rng.below(x.p - m)]);
      const std::size_t f = features[m];
      buf.clear();
      for (std::size_t k = task.begin; k < task.end; ++k) buf.emplace_back(x.at(sample[k], f), y[sample[k]]);
      std::sort(buf.begin(), buf.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < count; ++i) {
        left_sum += buf[i].second;
        if (!(buf[i].first < buf[i + 1].first)) continue;
        const double nl = static_cast<double>(i + 1), nr = static_cast<double>(count - i - 1);
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<std::int32_t>(f);
          double mid = buf[i].first + (buf[i + 1].first - buf[i].first) * 0.5;
          if (!(mid < buf[i + 1].first)) mid = buf[i].first;
          best_threshold = mid;
        }
      }
    }
    // Require a real decrease in squared error, not float noise.
    if (best_feature < 0 || best_score <= parent_score + 1e-12 * std::abs(parent_score)) continue;

    auto* first = sample.data() + task.begin;
    auto* last = sample.data() + task.end;
    auto* mid = std::partition(first, last, [&](std::uint32_t s) {
      return x.at(s, static_cast<std::size_t>(best_feature)) <= best_threshold;
    });
    const std::size_t split = task.begin + static_cast<std::size_t>(mid - first);
    if (split == task.begin || split == task.end) continue;

    const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    const auto right_id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[task.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_id;
    node.right = right_id;
    stack.push_back({right_id, split, task.end});
    stack.push_back({left_id, task.begin, split});
  }
  return tree;
}

}  // namespace

RandomForest RandomForest::fit(const Matrix& x, std::span<const double> y, const RFParams& params,
                               const Parallel& par) {
  const std::size_t n = x.rows(), p = x.cols();
  require(n >= 2, "random forest: need at least 2 rows");
  require(y.size() == n, "random forest: response length differs from row count");
  params.validate(p);
  const std::size_t mtry = params.resolved_mtry(p);
  const Frame frame = to_frame(x);

  RandomForest rf;
  rf.num_features_ = p;
  rf.trees_.resize(params.num_trees);
  std::vector<std::vector<double>> tree_importance(params.num_trees);
  std::vector<bool> has_oob(params.num_trees, false);

  par.for_each_index(params.num_trees, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, "rf-tree", t));
    std::vector<std::uint32_t> sample(n);
    std::vector<bool> in_bag(n, false);
    for (auto& s : sample) {
      s = static_cast<std::uint32_t>(rng.below(n));
      in_bag[s] = true;
    }
    rf.trees_[t] = grow_tree(frame, y, sample, mtry, params.min_node_size, rng);

    if (!params.permutation_importance) return;
    std::vector<std::size_t> oob;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_bag[i]) oob.push_back(i);
    if (oob.empty()) return;
    has_oob[t] = true;
    const RegressionTree& tree = rf.trees_[t];
    double base = 0.0;
    for (std::size_t i : oob) {
      const double e = y[i] - tree.predict(x.row(i));
      base += e * e;
    }
    base /= static_cast<double>(oob.size());
    Rng perm_rng(derive_seed(params.seed, "rf-importance", t));
    std::vector<double> row(p), permuted(oob.size());
    auto& imp = tree_importance[t];
    imp.assign(p, 0.0);
    for (std::size_t f = 0; f < p; ++f) {
      for (std::size_t k = 0; k < oob.size(); ++k) permuted[k] = x(oob[k], f);
      perm_rng.shuffle(std::span<double>(permuted));
      double mse = 0.0;
      for (std::size_t k = 0; k < oob.size(); ++k) {
        auto src = x.row(oob[k]);
        std::copy(src.begin(), src.end(), row.begin());
        row[f] = permuted[k];
        const double e = y[oob[k]] - tree.predict(row);
        mse += e * e;
      }
      imp[f] = mse / static_cast<double>(oob.size()) - base;
    }
  });

  rf.importance_.assign(p, 0.0);
  std::size_t used = 0;
  for (std::size_t t = 0; t < params.num_trees; ++t) {
    if (!has_oob[t]) continue;
    ++used;
    for (std::size_t f = 0; f < p; ++f) rf.importance_[f] += tree_importance[t][f];
  }
  for (double& v : rf.importance_) v = used ? std::max(0.0, v / static_cast<double>(used)) : 0.0;
  return rf;
}

double RandomForest::predict(std::span<const double> row) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(row);
  return s / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::predict(const Matrix& x) const {
  require(x.cols() == num_features_, "random forest: predictor count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

RandomForest RandomForest::from_parts(std::vector<RegressionTree> trees, std::vector<double> importance,
                                      std::size_t num_features) {
  require(!trees.empty(), "random forest: no trees");
  require(importance.size() == num_features, "random forest: importance length mismatch");
  for (const auto& t : trees) {
    require(!t.nodes.empty(), "random forest: empty tree");
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
      const auto& nd = t.nodes[id];
      if (nd.feature < 0) continue;
      // Children are always stored after their parent, which rules out cycles.
      require(static_cast<std::size_t>(nd.feature) < num_features && nd.left > id && nd.right > id &&
                  nd.left < t.nodes.size() && nd.right < t.nodes.size(),
              "random forest: malformed tree node");
    }
  }
  RandomForest rf;
  rf.trees_ = std::move(trees);
  rf.importance_ = std::move(importance);
  rf.num_features_ = num_features;
  return rf;
}

}  // namespace spcv
