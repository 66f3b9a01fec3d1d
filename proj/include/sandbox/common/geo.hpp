#pragma once

namespace sandbox::geo {

inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kPi = 3.14159265358979323846;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

double haversine_m(LatLon a, LatLon b);

// Point at `fraction` along the great circle from a to b (spherical slerp).
LatLon interpolate(LatLon a, LatLon b, double fraction);

// Shift a point by a local east/north displacement in meters.
LatLon offset_m(LatLon p, double east_m, double north_m);

// Destination after travelling `distance_m` on initial bearing `bearing_deg`.
LatLon destination(LatLon p, double bearing_deg, double distance_m);

bool valid(LatLon p);

}  // namespace sandbox::geo
