#include "spatialcv/geodist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spatialcv/error.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/rng.hpp"
#include "spatialcv/stats.hpp"
#include "spatialcv/svg.hpp"

namespace spcv {

const std::vector<double>* DistanceDistributions::find(const std::string& name) const {
  for (const auto& g : groups)
    if (g.name == name) return &g.values;
  return nullptr;
}

void DistanceDistributions::validate() const {
  for (const auto& g : groups) {
    require(!g.values.empty(), "distance group '" + g.name + "' is empty");
    for (double v : g.values) require(v >= 0.0, "distance group '" + g.name + "' has a negative distance");
  }
}

DomainSample sample_prediction_points(const RasterStack& grid, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> valid = grid.valid_cells();
  if (valid.empty()) throw DataError("sample_prediction_points: raster has no valid (non-nodata) cells");
  DomainSample out;
  if (valid.size() > n) {
    // Partial Fisher-Yates: the first n entries become the sample.
    Rng rng(derive_seed(seed, "domain_sample"));
    for (std::size_t i = 0; i < n; ++i) std::swap(valid[i], valid[i + rng.below(valid.size() - i)]);
    valid.resize(n);
    std::sort(valid.begin(), valid.end());
  }
  out.cells = std::move(valid);
  out.points.crs = grid.geometry.crs;
  for (std::size_t c : out.cells) out.points.coords.push_back(grid.geometry.cell_center(c));
  return out;
}

DistanceDistributions geodist(const PointSet& training, const PointSet& domain_sample, const CvScheme* folds,
                              const PointSet* test, const Parallel& par) {
  require(training.size() >= 2, "geodist: need at least 2 training points");
  DistanceDistributions d;
  d.space = DistanceSpace::geographic;
  d.groups.push_back({kSampleToSample, nnd_within(training, par)});
  if (folds) {
    if (scheme_size(*folds) != training.size())
      throw PreconditionError("geodist: folds reference " + std::to_string(scheme_size(*folds)) +
                              " rows but there are " + std::to_string(training.size()) + " training points");
    d.groups.push_back({kCvDistances, cv_distances(training, *folds, par)});
  }
  d.groups.push_back({kPredictionToSample, nnd_between(domain_sample, training, par)});
  if (test) d.groups.push_back({kTestToSample, nnd_between(*test, training, par)});
  d.validate();
  return d;
}

DistanceDistributions geodist_features(const Matrix& training, const Matrix& domain_sample, const CvScheme* folds,
                                       const Matrix* test, const Parallel& par) {
  require(training.rows() >= 2, "geodist: need at least 2 training rows");
  require(domain_sample.cols() == training.cols(), "geodist: domain rows have a different predictor count");
  const ColumnScaling scaling = ColumnScaling::fit(training);
  const Matrix train = scaling.apply(training);
  const std::size_t n = train.rows();

  auto nearest_in = [&](const Matrix& queries, const NnIndex& index) {
    std::vector<double> out(queries.rows());
    par.for_each_index(queries.rows(), [&](std::size_t i) { out[i] = index.nearest(queries.row(i)).distance; });
    return out;
  };

  DistanceDistributions d;
  d.space = DistanceSpace::feature;
  const NnIndex all(train);
  {
    std::vector<double> s2s(n);
    par.for_each_index(n, [&](std::size_t i) {
      s2s[i] = all.nearest(train.row(i), [i](std::size_t j) { return j != i; }).distance;
    });
    d.groups.push_back({kSampleToSample, std::move(s2s)});
  }
  if (folds) {
    if (scheme_size(*folds) != n)
      throw PreconditionError("geodist: folds reference " + std::to_string(scheme_size(*folds)) +
                              " rows but there are " + std::to_string(n) + " training rows");
    std::vector<double> cv(n);
    if (const auto* fa = std::get_if<FoldAssignment>(folds)) {
      fa->validate();
      for (std::size_t f = 0; f < fa->k; ++f) {
        const NnIndex side(train.select_rows(fa->index_train[f]));
        for (std::size_t i = 0; i < n; ++i)
          if (fa->fold_of[i] == f) cv[i] = side.nearest(train.row(i)).distance;
      }
    } else {
      const auto& ex = std::get<NNDMExclusion>(*folds);
      ex.validate();
      par.for_each_index(n, [&](std::size_t i) {
        const auto& set = ex.exclude[i];
        cv[i] = all.nearest(train.row(i), [&](std::size_t j) {
                     return !std::binary_search(set.begin(), set.end(), j);
                   }).distance;
      });
    }
    d.groups.push_back({kCvDistances, std::move(cv)});
  }
  d.groups.push_back({kPredictionToSample, nearest_in(scaling.apply(domain_sample), all)});
  if (test) {
    require(test->cols() == training.cols(), "geodist: test rows have a different predictor count");
    d.groups.push_back({kTestToSample, nearest_in(scaling.apply(*test), all)});
  }
  d.validate();
  return d;
}

PlotStat parse_plot_stat(const std::string& name) {
  if (name == "density") return PlotStat::density;
  if (name == "ecdf") return PlotStat::ecdf;
  throw PreconditionError("unknown plot stat '" + name + "' (expected density|ecdf)");
}

std::string plot_distributions(const DistanceDistributions& d, PlotStat stat) {
  LinePlot plot;
  const bool geo = d.space == DistanceSpace::geographic;
  plot.x_label = geo ? "nearest neighbour distance" : "nearest neighbour distance (feature space)";
  if (stat == PlotStat::ecdf) {
    plot.title = "Nearest neighbour distance ECDF";
    plot.y_label = "ECDF";
    for (const auto& g : d.groups) {
      std::vector<double> v = g.values;
      std::sort(v.begin(), v.end());
      Series s{g.name, {}, {}, false};
      const double n = static_cast<double>(v.size());
      s.x.push_back(v.front());
      s.y.push_back(0.0);
      for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        s.x.push_back(v[i]);
        s.y.push_back(static_cast<double>(i) / n);
        s.x.push_back(v[i]);
        s.y.push_back(static_cast<double>(j) / n);
        i = j;
      }
      plot.series.push_back(std::move(s));
    }
  } else {
    plot.title = "Nearest neighbour distance density";
    plot.y_label = "density";
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& g : d.groups)
      for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    constexpr std::size_t kBins = 64;
    const double width = hi > lo ? (hi - lo) / kBins : 1.0;
    for (const auto& g : d.groups) {
      std::vector<double> counts(kBins, 0.0);
      for (double v : g.values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(b, kBins - 1)] += 1.0;
      }
      Series s{g.name, {}, {}, false};
      for (std::size_t b = 0; b < kBins; ++b) {
        s.x.push_back(lo + (static_cast<double>(b) + 0.5) * width);
        s.y.push_back(counts[b] / (static_cast<double>(g.values.size()) * width));
      }
      plot.series.push_back(std::move(s));
    }
  }
  return render_line_plot(plot);
}

}  // namespace spcv
