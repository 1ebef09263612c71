#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spatialcv/folds.hpp"
#include "spatialcv/geom.hpp"
#include "spatialcv/matrix.hpp"
#include "spatialcv/raster.hpp"

namespace spcv {

enum class DistanceSpace { geographic, feature };

inline constexpr const char* kSampleToSample = "sample-to-sample";
inline constexpr const char* kCvDistances = "CV-distances";
inline constexpr const char* kPredictionToSample = "prediction-to-sample";
inline constexpr const char* kTestToSample = "test-to-sample";

struct DistanceGroup {
  std::string name;
  std::vector<double> values;
};

/// Nearest-neighbour distance distributions to compare, in a fixed group order.
struct DistanceDistributions {
  DistanceSpace space = DistanceSpace::geographic;
  std::vector<DistanceGroup> groups;

  const std::vector<double>* find(const std::string& name) const;
  void validate() const;
};

struct DomainSample {
  PointSet points;
  std::vector<std::size_t> cells;  // raster cell of each sampled point
};

/// Draws up to `n` distinct valid cells uniformly without replacement and
/// returns their centers (all valid cells when fewer than n exist).
DomainSample sample_prediction_points(const RasterStack& grid, std::size_t n, std::uint64_t seed);

/// Geographic nearest-neighbour distance distributions.
DistanceDistributions geodist(const PointSet& training, const PointSet& domain_sample,
                              const CvScheme* folds = nullptr, const PointSet* test = nullptr,
                              const Parallel& par = {});

/// Feature-space variant. Every matrix is standardized with the training
/// rows' column mean and sample sd before distances are taken.
DistanceDistributions geodist_features(const Matrix& training, const Matrix& domain_sample,
                                       const CvScheme* folds = nullptr, const Matrix* test = nullptr,
                                       const Parallel& par = {});

enum class PlotStat { density, ecdf };

PlotStat parse_plot_stat(const std::string& name);

/// SVG with one curve per group: a 64-bin normalized histogram polyline over
/// the pooled range (density) or the ECDF step curve.
std::string plot_distributions(const DistanceDistributions& d, PlotStat stat);

}  // namespace spcv
