#include "sandbox/common/geo.hpp"

#include <algorithm>
#include <cmath>

namespace sandbox::geo {

double haversine_m(LatLon a, LatLon b) {
  const double p1 = deg2rad(a.lat);
  const double p2 = deg2rad(b.lat);
  const double dp = p2 - p1;
  const double dl = deg2rad(b.lon - a.lon);
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LatLon interpolate(LatLon a, LatLon b, double fraction) {
  if (fraction <= 0.0) return a;
  if (fraction >= 1.0) return b;
  const double delta = haversine_m(a, b) / kEarthRadiusM;
  if (delta < 1e-12) return a;
  const double p1 = deg2rad(a.lat), l1 = deg2rad(a.lon);
  const double p2 = deg2rad(b.lat), l2 = deg2rad(b.lon);
  const double wa = std::sin((1.0 - fraction) * delta) / std::sin(delta);
  const double wb = std::sin(fraction * delta) / std::sin(delta);
  const double x = wa * std::cos(p1) * std::cos(l1) + wb * std::cos(p2) * std::cos(l2);
  const double y = wa * std::cos(p1) * std::sin(l1) + wb * std::cos(p2) * std::sin(l2);
  const double z = wa * std::sin(p1) + wb * std::sin(p2);
  return {rad2deg(std::atan2(z, std::sqrt(x * x + y * y))), rad2deg(std::atan2(y, x))};
}

LatLon offset_m(LatLon p, double east_m, double north_m) {
  const double dlat = rad2deg(north_m / kEarthRadiusM);
  const double coslat = std::max(1e-9, std::cos(deg2rad(p.lat)));
  const double dlon = rad2deg(east_m / (kEarthRadiusM * coslat));
  return {p.lat + dlat, p.lon + dlon};
}

LatLon destination(LatLon p, double bearing_deg, double distance_m) {
  const double d = distance_m / kEarthRadiusM;
  const double b = deg2rad(bearing_deg);
  const double p1 = deg2rad(p.lat), l1 = deg2rad(p.lon);
  const double p2 = std::asin(std::sin(p1) * std::cos(d) + std::cos(p1) * std::sin(d) * std::cos(b));
  const double l2 =
      l1 + std::atan2(std::sin(b) * std::sin(d) * std::cos(p1), std::cos(d) - std::sin(p1) * std::sin(p2));
  double lon = rad2deg(l2);
  lon = std::fmod(lon + 540.0, 360.0) - 180.0;
  return {rad2deg(p2), lon};
}

bool valid(LatLon p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

}  // namespace sandbox::geo
