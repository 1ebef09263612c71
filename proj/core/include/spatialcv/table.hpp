#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spatialcv/model.hpp"
#include "spatialcv/raster.hpp"

namespace spcv {

/// Training samples: columns x, y, optional t, predictors, response.
struct TrainingTable {
  Dataset data;  // data.points holds x/y (and t when present)
  std::string response = "response";
};

/// Splits one CSV record (RFC 4180 quoting).
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_quote(const std::string& field);

/// Reads a training CSV. The response is the column named `response`, or the
/// last column when no name is given. Non-finite values are rejected with the
/// 1-based line number.
TrainingTable read_training_csv(const std::filesystem::path& path, CrsKind crs = CrsKind::projected,
                                const std::optional<std::string>& response = std::nullopt);
TrainingTable parse_training_csv(const std::string& text, CrsKind crs = CrsKind::projected,
                                 const std::optional<std::string>& response = std::nullopt);

std::string format_training_csv(const TrainingTable& table);
void write_training_csv(const TrainingTable& table, const std::filesystem::path& path);

struct Extraction {
  Matrix X;                        // one row per kept point, bands in `names` order
  std::vector<std::string> names;
  std::vector<std::size_t> kept;   // indices of points with valid values
  std::vector<std::size_t> cells;  // raster cell of each kept point
};

/// Values of the given bands (all bands when empty) at the cell containing
/// each point. Points on nodata cells are dropped with a warning; points
/// outside the extent are an error.
Extraction extract_at_points(const RasterStack& stack, const PointSet& points,
                             const std::vector<std::string>& names = {});

}  // namespace spcv
