#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sostutor/model.hpp"

namespace sostutor::geo {

inline constexpr double kEarthRadiusM = 6'371'000.0;
// Anything strictly beyond this is out of reach.
inline constexpr double kNearLimitM = 500.0;

enum class ProximityClass { near, far };

inline const char* to_string(ProximityClass c) { return c == ProximityClass::near ? "near" : "far"; }

inline double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Haversine great-circle distance on a sphere of radius kEarthRadiusM.
inline double distance_meters(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return 0.0;
  const double lat1 = to_radians(a.latitude_deg);
  const double lat2 = to_radians(b.latitude_deg);
  const double dlat = lat2 - lat1;
  const double dlon = to_radians(b.longitude_deg - a.longitude_deg);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

inline ProximityClass classify_proximity(double meters) {
  return meters > kNearLimitM ? ProximityClass::far : ProximityClass::near;
}

}  // namespace sostutor::geo
