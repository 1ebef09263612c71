#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spatialcv/geom.hpp"

namespace spcv::detail {

inline double to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }

// Out of line so the compiler cannot fuse it with a nearby sin() into sincos(),
// whose result may differ from cos() in the last bit.
double cos_lat(double lat_rad);

// Shared by distance() and NnIndex so both produce bit-identical values.
inline double haversine_rad(double lon1, double lat1, double cos_lat1, double lon2, double lat2,
                            double cos_lat2) {
  const double s_lat = std::sin((lat2 - lat1) * 0.5);
  const double s_lon = std::sin((lon2 - lon1) * 0.5);
  const double a = s_lat * s_lat + cos_lat1 * cos_lat2 * s_lon * s_lon;
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

inline double euclid2(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

}  // namespace spcv::detail
