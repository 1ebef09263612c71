#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spatialcv/raster.hpp"

namespace spcv {

/// Fixed series colors used by every line plot, in group order.
inline constexpr const char* kSeriesPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                 "#66a61e", "#e6ab02", "#a6761d", "#666666"};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // scatter points instead of a polyline
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Renders a simple x/y chart as an SVG 1.1 document. Output bytes depend only
/// on the input values.
std::string render_line_plot(const LinePlot& plot);

enum class Palette { viridis, magma, greys };

Palette parse_palette(const std::string& name);

/// Heatmap of a grid with a linear color ramp over [min, max] of the valid
/// cells and a legend. Nodata cells, and cells where `mask` is 0 or nodata,
/// are left transparent.
std::string render_grid(const Grid& grid, Palette palette = Palette::viridis, const Grid* mask = nullptr,
                        const std::string& title = "");

}  // namespace spcv
