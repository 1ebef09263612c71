#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spatialcv/raster.hpp"
#include "spatialcv/table.hpp"

namespace spcv {

enum class SamplingDesign { random, clustered };

struct SyntheticScenario {
  std::size_t ncols = 100;
  std::size_t nrows = 100;
  double cellsize = 1.0;
  std::size_t informative = 3;
  std::size_t noise = 3;
  std::size_t bumps = 10;          // Gaussian bumps per predictor field
  double bump_width = 0.12;        // bump sd as a fraction of the grid width
  SamplingDesign design = SamplingDesign::random;
  std::size_t clusters = 8;
  double cluster_radius = 5.0;     // in cells
  std::size_t samples = 200;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

SyntheticScenario parse_scenario(const std::string& json_text);
std::string scenario_json(const SyntheticScenario& s);

struct SyntheticData {
  RasterStack predictors;                     // bands v1..vm
  TrainingTable training;                     // x, y, predictors, response
  Grid truth;                                 // noiseless response
  std::vector<std::string> informative_names;
  std::vector<std::size_t> sample_cells;
};

/// Deterministic per seed. Informative and noise predictors are smooth
/// Gaussian-bump fields; band names are assigned in seeded random order.
SyntheticData generate_synthetic(const SyntheticScenario& s);

}  // namespace spcv
