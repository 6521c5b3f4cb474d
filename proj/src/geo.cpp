#include "pforge/geo.hpp"

#include <cmath>
#include <numbers>

namespace pforge::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double distance_km(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.latitude * kDegToRad;
  const double lat2 = b.latitude * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.longitude - a.longitude) * kDegToRad;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

bool radius_check(std::span<const Location> chosen, const Location& candidate, double radius_km) {
  if (!candidate.point) return true;
  for (const auto& loc : chosen) {
    if (!loc.point) continue;
    if (distance_km(*loc.point, *candidate.point) > radius_km) return false;
  }
  return true;
}

std::optional<GeoPoint> centroid(std::span<const Location> locations) {
  double x = 0.0, y = 0.0, z = 0.0;
  int n = 0;
  for (const auto& loc : locations) {
    if (!loc.point) continue;
    const double lat = loc.point->latitude * kDegToRad;
    const double lon = loc.point->longitude * kDegToRad;
    x += std::cos(lat) * std::cos(lon);
    y += std::cos(lat) * std::sin(lon);
    z += std::sin(lat);
    ++n;
  }
  if (n == 0) return std::nullopt;
  const double hyp = std::hypot(x, y);
  if (hyp == 0.0 && z == 0.0) {
    // Antipodal points cancel out; any member is as central as another.
    for (const auto& loc : locations) {
      if (loc.point) return loc.point;
    }
  }
  return GeoPoint{std::atan2(z, hyp) / kDegToRad, std::atan2(y, x) / kDegToRad};
}

}  // namespace pforge::geo
