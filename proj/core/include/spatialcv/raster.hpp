#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spatialcv/geom.hpp"

namespace spcv {

/// Shape and georeference shared by aligned grids. Rows run north to south;
/// (xll, yll) is the lower-left corner of the lower-left cell.
struct GridGeometry {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double xll = 0.0;
  double yll = 0.0;
  double cellsize = 1.0;
  double nodata_value = -9999.0;
  CrsKind crs = CrsKind::projected;

  std::size_t cells() const { return ncols * nrows; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * ncols + col; }
  Point cell_center(std::size_t cell) const {
    const std::size_t r = cell / ncols, c = cell % ncols;
    return {xll + (static_cast<double>(c) + 0.5) * cellsize,
            yll + (static_cast<double>(nrows - r) - 0.5) * cellsize};
  }
  /// Cell containing `p`; nullopt outside the extent. Points on the outer
  /// east/north edge map to the last column/row.
  std::optional<std::size_t> cell_of(Point p) const;

  bool same_shape(const GridGeometry& o) const {
    return ncols == o.ncols && nrows == o.nrows && xll == o.xll && yll == o.yll && cellsize == o.cellsize;
  }
  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

inline constexpr double kNoData = std::numeric_limits<double>::quiet_NaN();
inline bool is_nodata(double v) { return std::isnan(v); }

/// A single-band grid. Nodata cells are stored as NaN in memory and written
/// with `geometry.nodata_value` on disk.
struct Grid {
  GridGeometry geometry;
  std::vector<double> values;

  Grid() = default;
  explicit Grid(GridGeometry g, double fill = kNoData) : geometry(g), values(g.cells(), fill) {}
  std::size_t valid_cells() const;
};

struct Band {
  std::string name;
  std::vector<double> values;
};

/// Named, aligned predictor grids.
struct RasterStack {
  GridGeometry geometry;
  std::vector<Band> bands;

  const Band* find(const std::string& name) const;
  const Band& band(const std::string& name) const;  // throws DataError naming the band
  std::vector<std::string> names() const;
  /// A cell is valid when no band holds nodata there.
  bool cell_valid(std::size_t cell) const;
  std::vector<std::size_t> valid_cells() const;
  void validate() const;
};

/// ESRI ASCII grid: ncols, nrows, xllcorner, yllcorner, cellsize, NODATA_value.
/// Values are written with shortest round-trip formatting.
Grid read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const Grid& grid, const std::filesystem::path& path);

/// Manifest JSON {"schema_version":1,"crs":...,"bands":[{"name":...,"file":...}]};
/// band files are resolved relative to the manifest's directory.
RasterStack read_raster_stack(const std::filesystem::path& manifest);
void write_raster_stack(const RasterStack& stack, const std::filesystem::path& manifest);

std::string format_double(double v);

}  // namespace spcv
