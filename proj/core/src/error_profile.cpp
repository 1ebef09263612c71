#include "spatialcv/error_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spatialcv/clustering.hpp"
#include "spatialcv/error.hpp"
#include "spatialcv/log.hpp"
#include "spatialcv/rng.hpp"
#include "spatialcv/stats.hpp"
#include "spatialcv/svg.hpp"

namespace spcv {

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "DI" || name == "di") return ProfileKind::di;
  if (name == "LPD" || name == "lpd") return ProfileKind::lpd;
  throw PreconditionError("unknown profile kind '" + name + "' (expected DI|LPD)");
}

std::string to_string(ProfileKind kind) { return kind == ProfileKind::di ? "DI" : "LPD"; }

double ErrorProfile::operator()(double value) const {
  if (knots_x.size() == 1 || value <= knots_x.front()) return knots_y.front();
  if (value >= knots_x.back()) return knots_y.back();
  const auto it = std::upper_bound(knots_x.begin(), knots_x.end(), value);
  const std::size_t hi = static_cast<std::size_t>(it - knots_x.begin());
  const std::size_t lo = hi - 1;
  const double t = (value - knots_x[lo]) / (knots_x[hi] - knots_x[lo]);
  return knots_y[lo] + t * (knots_y[hi] - knots_y[lo]);
}

void ErrorProfile::validate() const {
  require(!knots_x.empty() && knots_x.size() == knots_y.size(), "ErrorProfile: knots missing");
  for (std::size_t i = 1; i < knots_x.size(); ++i) {
    require(knots_x[i] > knots_x[i - 1], "ErrorProfile: knots must be strictly increasing");
    if (kind == ProfileKind::di)
      require(knots_y[i] >= knots_y[i - 1], "ErrorProfile: DI profile must be nondecreasing");
    else
      require(knots_y[i] <= knots_y[i - 1], "ErrorProfile: LPD profile must be nonincreasing");
  }
  for (const auto& w : windows) require(w.size >= window, "ErrorProfile: window smaller than the window size");
}

std::vector<double> isotonic_increasing(const std::vector<double>& y, const std::vector<double>& w) {
  require(y.size() == w.size(), "isotonic_increasing: weights do not match values");
  struct Block {
    double sum_wy, sum_w;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({w[i] * y[i], w[i], 1});
    while (blocks.size() > 1) {
      const Block& b = blocks.back();
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum_wy / a.sum_w <= b.sum_wy / b.sum_w) break;
      const Block merged{a.sum_wy + b.sum_wy, a.sum_w + b.sum_w, a.count + b.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.sum_wy / b.sum_w);
  return out;
}

std::size_t default_window(std::size_t n) { return std::max<std::size_t>(10, n / 20); }

ErrorProfile error_profile(const std::vector<PooledPrediction>& pooled, const std::vector<double>& values,
                           std::optional<std::size_t> window, ProfileKind kind) {
  require(pooled.size() == values.size(), "error_profile: " + std::to_string(values.size()) +
                                              " values for " + std::to_string(pooled.size()) + " CV predictions");
  const std::size_t n = pooled.size();
  const std::size_t win = window.value_or(default_window(n));
  require(win >= 1, "error_profile: window must be at least 1");
  if (n < 2 * win)
    throw PreconditionError("error_profile: " + std::to_string(n) + " rows are too few for window " +
                            std::to_string(win) + "; use a window of at most " + std::to_string(n / 2));
  for (double v : values) require(std::isfinite(v), "error_profile: values must be finite");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  ErrorProfile p;
  p.kind = kind;
  p.window = win;
  p.valid_min = values[order.front()];
  p.valid_max = values[order.back()];
  for (std::size_t start = 0; start + win <= n; ++start) {
    double sv = 0.0, se = 0.0;
    for (std::size_t j = start; j < start + win; ++j) {
      const auto& r = pooled[order[j]];
      sv += values[order[j]];
      const double e = r.predicted - r.observed;
      se += e * e;
    }
    p.windows.push_back({sv / static_cast<double>(win), std::sqrt(se / static_cast<double>(win)), win});
  }

  std::vector<double> y, w(p.windows.size(), 1.0);
  for (const auto& ws : p.windows) y.push_back(kind == ProfileKind::di ? ws.rmse : -ws.rmse);
  std::vector<double> fit = isotonic_increasing(y, w);
  if (kind == ProfileKind::lpd)
    for (double& v : fit) v = -v;

  // Windows sharing a center collapse to one knot at their mean fitted value.
  for (std::size_t i = 0; i < p.windows.size();) {
    std::size_t j = i;
    double s = 0.0;
    while (j < p.windows.size() && p.windows[j].center == p.windows[i].center) s += fit[j++];
    p.knots_x.push_back(p.windows[i].center);
    p.knots_y.push_back(s / static_cast<double>(j - i));
    i = j;
  }
  p.validate();
  return p;
}

std::vector<std::size_t> default_cluster_counts(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t c : {std::size_t{3}, std::size_t{5}, std::size_t{10}, std::size_t{20}, n})
    if (c <= n && (out.empty() || out.back() != c)) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MultiCv multicv_calibrate(const Dataset& data, const ModelSpec& spec, const TrainDI& trained,
                          std::vector<std::size_t> cluster_counts, std::uint64_t seed, const Parallel& par) {
  data.validate();
  const std::size_t n = data.rows();
  require(n >= 3, "multicv_calibrate: at least 3 rows are required");
  std::sort(cluster_counts.begin(), cluster_counts.end());
  cluster_counts.erase(std::unique(cluster_counts.begin(), cluster_counts.end()), cluster_counts.end());

  const Matrix standardized = ColumnScaling::fit(data.select_columns(trained.names).X)
                                  .apply(data.select_columns(trained.names).X);
  MultiCv out;
  for (std::size_t c : cluster_counts) {
    if (c > n) {
      warn("multicv_calibrate: skipping " + std::to_string(c) + " clusters (only " + std::to_string(n) + " rows)");
      continue;
    }
    if (c < 2) {
      warn("multicv_calibrate: skipping " + std::to_string(c) + " cluster(s); at least 2 folds are needed");
      continue;
    }
    std::vector<std::size_t> labels(n);
    if (c == n) {
      std::iota(labels.begin(), labels.end(), 0);
    } else {
      labels = kmeans(standardized, c, derive_seed(seed, "multicv-kmeans", c)).labels;
    }
    const FoldAssignment folds = FoldAssignment::from_labels(labels, c, "multicv", seed);
    MultiCvRun run;
    run.clusters = c;
    run.cv = cross_validate(data, spec, folds, par);
    const auto di = cross_fold_di(trained, data, labels);
    const auto lpd = cross_fold_lpd(trained, data, labels);
    for (const auto& r : run.cv.pooled) {
      run.di.push_back(di[r.row]);
      run.lpd.push_back(lpd[r.row]);
    }
    out.pooled.insert(out.pooled.end(), run.cv.pooled.begin(), run.cv.pooled.end());
    out.di.insert(out.di.end(), run.di.begin(), run.di.end());
    out.lpd.insert(out.lpd.end(), run.lpd.begin(), run.lpd.end());
    out.runs.push_back(std::move(run));
  }
  require(!out.runs.empty(), "multicv_calibrate: no usable cluster count");
  return out;
}

Grid predict_error(const ErrorProfile& profile, const Grid& values, ProfileKind values_kind, const Grid& aoa_grid) {
  if (values_kind != profile.kind)
    throw PreconditionError("predict_error: profile was fitted on " + to_string(profile.kind) +
                            " but the grid holds " + to_string(values_kind));
  if (!values.geometry.same_shape(aoa_grid.geometry) || values.values.size() != aoa_grid.values.size())
    throw PreconditionError("predict_error: grids are not aligned");
  profile.validate();
  Grid out(values.geometry);
  for (std::size_t c = 0; c < values.values.size(); ++c) {
    if (is_nodata(values.values[c]) || aoa_grid.values[c] != 1.0) continue;
    out.values[c] = profile(values.values[c]);
  }
  return out;
}

std::string plot_profile(const ErrorProfile& profile) {
  LinePlot plot;
  plot.title = "Expected error vs " + to_string(profile.kind);
  plot.x_label = to_string(profile.kind);
  plot.y_label = "RMSE";
  Series windows{"window RMSE", {}, {}, true};
  for (const auto& w : profile.windows) {
    windows.x.push_back(w.center);
    windows.y.push_back(w.rmse);
  }
  Series fitted{"monotone fit", profile.knots_x, profile.knots_y, false};
  plot.series = {std::move(windows), std::move(fitted)};
  return render_line_plot(plot);
}

}  // namespace spcv
