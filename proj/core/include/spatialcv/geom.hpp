#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spatialcv/parallel.hpp"

namespace spcv {

enum class CrsKind { geographic, projected };

/// Mean Earth radius used for great-circle (haversine) distances, in meters.
inline constexpr double kEarthRadius = 6'371'000.0;

struct Point {
  double x = 0.0;  // longitude in degrees, or easting in map units
  double y = 0.0;  // latitude in degrees, or northing in map units
  friend bool operator==(const Point&, const Point&) = default;
};

/// Sample locations. Geographic sets hold lon/lat in degrees.
struct PointSet {
  std::vector<Point> coords;
  CrsKind crs = CrsKind::projected;
  std::optional<std::vector<std::int64_t>> time;

  std::size_t size() const { return coords.size(); }
  bool empty() const { return coords.empty(); }

  /// Throws DataError / std::domain_error when an invariant is broken.
  void validate() const;

  PointSet subset(std::span<const std::size_t> rows) const;
};

CrsKind parse_crs(std::string_view name);
std::string_view to_string(CrsKind crs);

/// Haversine great-circle distance in meters between lon/lat points in degrees.
double haversine(Point p, Point q);

/// Meters for geographic input, map units for projected input.
/// Throws std::domain_error for geographic coordinates out of range.
double distance(Point p, Point q, CrsKind crs);

/// For every point, the distance to its nearest *other* point in the set.
std::vector<double> nnd_within(const PointSet& a, const Parallel& par = {});

/// For every point of `a`, the distance to its nearest point in `b`.
std::vector<double> nnd_between(const PointSet& a, const PointSet& b, const Parallel& par = {});

}  // namespace spcv
