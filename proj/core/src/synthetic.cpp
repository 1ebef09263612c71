#include "spatialcv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <json.hpp>

#include "spatialcv/error.hpp"
#include "spatialcv/rng.hpp"

namespace spcv {

void SyntheticScenario::validate() const {
  require(ncols >= 2 && nrows >= 2, "scenario: grid must be at least 2x2");
  require(cellsize > 0.0, "scenario: cellsize must be positive");
  require(informative >= 1, "scenario: at least one informative predictor is required");
  require(bumps >= 1, "scenario: at least one bump per field");
  require(bump_width > 0.0, "scenario: bump_width must be positive");
  require(samples >= 2, "scenario: at least two samples");
  require(samples <= ncols * nrows, "scenario: " + std::to_string(samples) + " samples exceed the " +
                                        std::to_string(ncols * nrows) + " grid cells");
  require(noise_sd >= 0.0, "scenario: noise_sd must be nonnegative");
  if (design == SamplingDesign::clustered) {
    require(clusters >= 1, "scenario: clustered design needs at least one cluster");
    require(cluster_radius >= 0.0, "scenario: cluster_radius must be nonnegative");
  }
}

SyntheticScenario parse_scenario(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  SyntheticScenario s;
  s.ncols = j.value("ncols", s.ncols);
  s.nrows = j.value("nrows", s.nrows);
  s.cellsize = j.value("cellsize", s.cellsize);
  s.informative = j.value("informative", s.informative);
  s.noise = j.value("noise", s.noise);
  s.bumps = j.value("bumps", s.bumps);
  s.bump_width = j.value("bump_width", s.bump_width);
  const std::string design = j.value("design", std::string("random"));
  if (design == "random")
    s.design = SamplingDesign::random;
  else if (design == "clustered")
    s.design = SamplingDesign::clustered;
  else
    throw PreconditionError("scenario: unknown design '" + design + "'");
  s.clusters = j.value("clusters", s.clusters);
  s.cluster_radius = j.value("cluster_radius", s.cluster_radius);
  s.samples = j.value("samples", s.samples);
  s.noise_sd = j.value("noise_sd", s.noise_sd);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

std::string scenario_json(const SyntheticScenario& s) {
  nlohmann::ordered_json j;
  j["ncols"] = s.ncols;
  j["nrows"] = s.nrows;
  j["cellsize"] = s.cellsize;
  j["informative"] = s.informative;
  j["noise"] = s.noise;
  j["bumps"] = s.bumps;
  j["bump_width"] = s.bump_width;
  j["design"] = s.design == SamplingDesign::random ? "random" : "clustered";
  j["clusters"] = s.clusters;
  j["cluster_radius"] = s.cluster_radius;
  j["samples"] = s.samples;
  j["noise_sd"] = s.noise_sd;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

namespace {

// Sum of Gaussian bumps in unit coordinates, standardized to mean 0, sd 1.
std::vector<double> smooth_field(const SyntheticScenario& s, Rng& rng) {
  struct Bump {
    double cx, cy, sd, amp;
  };
  const double aspect = static_cast<double>(s.nrows) / static_cast<double>(s.ncols);
  std::vector<Bump> bumps;
  for (std::size_t b = 0; b < s.bumps; ++b) {
    const double cx = rng.uniform(-0.1, 1.1);
    const double cy = rng.uniform(-0.1, 1.1) * aspect;
    const double sd = s.bump_width * rng.uniform(0.6, 1.6);
    const double amp = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    bumps.push_back({cx, cy, sd, amp});
  }
  std::vector<double> v(s.ncols * s.nrows, 0.0);
  for (std::size_t r = 0; r < s.nrows; ++r)
    for (std::size_t c = 0; c < s.ncols; ++c) {
      const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(s.ncols);
      const double y = (static_cast<double>(s.nrows - r) - 0.5) / static_cast<double>(s.ncols);
      double f = 0.0;
      for (const auto& b : bumps) {
        const double dx = x - b.cx, dy = y - b.cy;
        f += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sd * b.sd));
      }
      v[r * s.ncols + c] = f;
    }
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
  return v;
}

double response_of(const std::vector<double>& f) {
  // Fixed nonlinear combination; terms cycle for additional predictors.
  double r = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    switch (j % 3) {
      case 0: r += 2.0 * std::tanh(f[j]); break;
      case 1: r += 0.6 * f[j] * f[j]; break;
      default: r += std::sin(1.5 * f[j]); break;
    }
  }
  if (f.size() >= 2) r += 0.5 * f[0] * f[1];
  return 10.0 + 3.0 * r;
}

std::vector<std::size_t> draw_cells(const SyntheticScenario& s, Rng& rng) {
  const std::size_t cells = s.ncols * s.nrows;
  if (s.design == SamplingDesign::random) {
    std::vector<std::size_t> all(cells);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < s.samples; ++i) std::swap(all[i], all[i + rng.below(cells - i)]);
    all.resize(s.samples);
    return all;
  }
  std::vector<std::pair<double, double>> centers;
  for (std::size_t k = 0; k < s.clusters; ++k)
    centers.emplace_back(rng.uniform(0.0, static_cast<double>(s.ncols)), rng.uniform(0.0, static_cast<double>(s.nrows)));
  std::set<std::size_t> used;
  std::vector<std::size_t> out;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * s.samples + 100000;
  while (out.size() < s.samples) {
    if (++attempts > max_attempts)
      throw PreconditionError("scenario: cannot place " + std::to_string(s.samples) +
                              " distinct samples in the clusters; increase cluster_radius or clusters");
    const auto& [cx, cy] = centers[out.size() % s.clusters];
    const double rad = s.cluster_radius * std::sqrt(rng.uniform());
    const double ang = 2.0 * std::numbers::pi * rng.uniform();
    const double px = cx + rad * std::cos(ang), py = cy + rad * std::sin(ang);
    if (px < 0.0 || py < 0.0 || px >= static_cast<double>(s.ncols) || py >= static_cast<double>(s.nrows)) continue;
    const std::size_t col = static_cast<std::size_t>(px);
    const std::size_t row = s.nrows - 1 - static_cast<std::size_t>(py);
    const std::size_t cell = row * s.ncols + col;
    if (used.insert(cell).second) out.push_back(cell);
  }
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticScenario& s) {
  s.validate();
  const std::size_t m = s.informative + s.noise;
  GridGeometry g;
  g.ncols = s.ncols;
  g.nrows = s.nrows;
  g.cellsize = s.cellsize;

  std::vector<std::vector<double>> fields;
  for (std::size_t j = 0; j < m; ++j) {
    Rng rng(derive_seed(s.seed, j < s.informative ? "synth-informative" : "synth-noise", j));
    fields.push_back(smooth_field(s, rng));
  }
  // Field j is published as band v{label[j]}.
  std::vector<std::size_t> label(m);
  std::iota(label.begin(), label.end(), 1);
  Rng name_rng(derive_seed(s.seed, "synth-names"));
  name_rng.shuffle(std::span<std::size_t>(label));

  SyntheticData out;
  out.predictors.geometry = g;
  std::vector<std::size_t> band_order(m);
  std::iota(band_order.begin(), band_order.end(), 0);
  std::sort(band_order.begin(), band_order.end(), [&](std::size_t a, std::size_t b) { return label[a] < label[b]; });
  for (std::size_t j : band_order) out.predictors.bands.push_back({"v" + std::to_string(label[j]), fields[j]});
  for (std::size_t j = 0; j < s.informative; ++j) out.informative_names.push_back("v" + std::to_string(label[j]));
  std::sort(out.informative_names.begin(), out.informative_names.end());

  out.truth = Grid(g);
  std::vector<double> f(s.informative);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    for (std::size_t j = 0; j < s.informative; ++j) f[j] = fields[j][c];
    out.truth.values[c] = response_of(f);
  }

  Rng sample_rng(derive_seed(s.seed, "synth-sampling"));
  out.sample_cells = draw_cells(s, sample_rng);
  Rng noise_rng(derive_seed(s.seed, "synth-response-noise"));
  Dataset& d = out.training.data;
  d.X = Matrix(s.samples, m);
  PointSet pts;
  pts.crs = g.crs;
  for (std::size_t i = 0; i < s.samples; ++i) {
    const std::size_t cell = out.sample_cells[i];
    pts.coords.push_back(g.cell_center(cell));
    for (std::size_t b = 0; b < m; ++b) d.X(i, b) = out.predictors.bands[b].values[cell];
    d.y.push_back(out.truth.values[cell] + s.noise_sd * noise_rng.normal());
  }
  d.names = out.predictors.names();
  d.points = std::move(pts);
  out.training.response = "response";
  out.predictors.validate();
  d.validate();
  return out;
}

}  // namespace spcv
