#include "spatialcv/geom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "geo_detail.hpp"
#include "spatialcv/error.hpp"
#include "spatialcv/nn_index.hpp"

namespace spcv {
namespace {

void check_geographic(Point p) {
  if (!(p.x >= -180.0 && p.x <= 180.0 && p.y >= -90.0 && p.y <= 90.0))
    throw std::domain_error("geographic coordinate out of range: (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
}

}  // namespace

void PointSet::validate() const {
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const Point p = coords[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError("point " + std::to_string(i) + " has non-finite coordinates");
    if (crs == CrsKind::geographic) check_geographic(p);
  }
  if (time && time->size() != coords.size())
    throw DataError("time stamps (" + std::to_string(time->size()) + ") do not match coordinates (" +
                    std::to_string(coords.size()) + ")");
}

PointSet PointSet::subset(std::span<const std::size_t> rows) const {
  PointSet out;
  out.crs = crs;
  out.coords.reserve(rows.size());
  for (std::size_t r : rows) out.coords.push_back(coords.at(r));
  if (time) {
    out.time.emplace();
    for (std::size_t r : rows) out.time->push_back(time->at(r));
  }
  return out;
}

CrsKind parse_crs(std::string_view name) {
  if (name == "geographic") return CrsKind::geographic;
  if (name == "projected") return CrsKind::projected;
  throw PreconditionError("unknown crs kind '" + std::string(name) + "' (expected geographic|projected)");
}

std::string_view to_string(CrsKind crs) {
  return crs == CrsKind::geographic ? "geographic" : "projected";
}

namespace detail {

[[gnu::noinline]] double cos_lat(double lat_rad) { return std::cos(lat_rad); }

}  // namespace detail

double haversine(Point p, Point q) {
  const double lat1 = detail::to_radians(p.y), lat2 = detail::to_radians(q.y);
  return detail::haversine_rad(detail::to_radians(p.x), lat1, detail::cos_lat(lat1), detail::to_radians(q.x),
                               lat2, detail::cos_lat(lat2));
}

double distance(Point p, Point q, CrsKind crs) {
  if (crs == CrsKind::geographic) {
    check_geographic(p);
    check_geographic(q);
    return haversine(p, q);
  }
  return detail::euclid2(p.x - q.x, p.y - q.y);
}

std::vector<double> nnd_within(const PointSet& a, const Parallel& par) {
  require(a.size() >= 2, "nnd_within: need at least 2 points, got " + std::to_string(a.size()));
  a.validate();
  const NnIndex index(a);
  std::vector<double> out(a.size());
  par.for_each_index(a.size(), [&](std::size_t i) {
    out[i] = index.nearest(a.coords[i], [i](std::size_t j) { return j != i; }).distance;
  });
  return out;
}

std::vector<double> nnd_between(const PointSet& a, const PointSet& b, const Parallel& par) {
  require(!b.empty(), "nnd_between: reference set is empty");
  require(a.crs == b.crs, "nnd_between: point sets use different crs kinds");
  a.validate();
  b.validate();
  const NnIndex index(b);
  std::vector<double> out(a.size());
  par.for_each_index(a.size(), [&](std::size_t i) { out[i] = index.nearest(a.coords[i]).distance; });
  return out;
}

}  // namespace spcv
