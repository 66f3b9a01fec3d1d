#pragma once

#include "sandbox/common/geo.hpp"
#include "sandbox/sensor/channel.hpp"

#include <cstdint>
#include <vector>

namespace sandbox::sensor {

// One straight great-circle movement between two points.
struct Leg {
  std::int64_t depart_ms = 0;
  std::int64_t arrive_ms = 0;
  geo::LatLon from;
  geo::LatLon to;
  double speed_mps = 0.0;
};

struct TrackPoint {
  geo::LatLon position;
  double speed_mps = 0.0;  // 0 while dwelling
};

// Piecewise path: stationary at `initial` until the first leg, then each leg
// in order, stationary at its destination until the next one departs.
class Track {
 public:
  explicit Track(geo::LatLon initial = {}) : initial_(initial) {}

  // Appends a leg departing no earlier than `earliest_ms` and no earlier than
  // the previous arrival. Zero-length legs are dropped.
  void add_leg(std::int64_t earliest_ms, geo::LatLon to, double speed_mps);

  TrackPoint at(std::int64_t t_ms) const;
  geo::LatLon current_end() const { return legs_.empty() ? initial_ : legs_.back().to; }
  std::int64_t end_ms() const { return legs_.empty() ? 0 : legs_.back().arrive_ms; }
  const std::vector<Leg>& legs() const { return legs_; }

 private:
  geo::LatLon initial_;
  std::vector<Leg> legs_;
};

// Fixed per-anchor displacement of at most `accuracy_m`, keyed by the anchor's
// coordinates so a repeated anchor lands on the same point.
geo::LatLon jitter_anchor(geo::LatLon anchor, double accuracy_m, std::uint64_t seed);

struct RouteOptions {
  double max_speed_mps = 70.0;  // profile bound; mode speed above it is rejected
  double accuracy_m = 8.0;
  double rate_hz = 1.0;
  std::int64_t start_ms = 0;
};

// Visits anchors in order at `mode_speed_mps`, dwelling dwell_ms[i] at anchor i
// (missing entries dwell 0). Frames carry (lat, lon, accuracy, speed).
std::vector<SensorFrame> plan_gps_route(const std::vector<geo::LatLon>& anchors, double mode_speed_mps,
                                        const std::vector<std::int64_t>& dwell_ms, std::uint64_t seed,
                                        const RouteOptions& options = {});

}  // namespace sandbox::sensor
