#pragma once

#include <span>

#include "pforge/record.hpp"

namespace pforge::geo {

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance (haversine).
double distance_km(const GeoPoint& a, const GeoPoint& b);

// True iff the candidate lies within radius_km of every chosen location.
// Unresolved locations on either side are not checked.
bool radius_check(std::span<const Location> chosen, const Location& candidate, double radius_km);

// Spherical centroid of the resolved points; nullopt when none are resolved.
std::optional<GeoPoint> centroid(std::span<const Location> locations);

}  // namespace pforge::geo
