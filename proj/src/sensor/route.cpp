#include "sandbox/sensor/route.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sandbox::sensor {

void Track::add_leg(std::int64_t earliest_ms, geo::LatLon to, double speed_mps) {
  const geo::LatLon from = current_end();
  const double dist = geo::haversine_m(from, to);
  if (dist <= 0.0 || !(speed_mps > 0.0)) return;
  Leg leg;
  leg.depart_ms = legs_.empty() ? earliest_ms : std::max(earliest_ms, legs_.back().arrive_ms);
  // Rounded up so the realized speed never exceeds the nominal one.
  leg.arrive_ms = leg.depart_ms + static_cast<std::int64_t>(std::ceil(dist / speed_mps * 1000.0));
  leg.from = from;
  leg.to = to;
  leg.speed_mps = speed_mps;
  legs_.push_back(leg);
}

TrackPoint Track::at(std::int64_t t_ms) const {
  auto it = std::upper_bound(legs_.begin(), legs_.end(), t_ms,
                             [](std::int64_t t, const Leg& l) { return t < l.depart_ms; });
  if (it == legs_.begin()) return {initial_, 0.0};
  const Leg& leg = *std::prev(it);
  if (t_ms >= leg.arrive_ms) return {leg.to, 0.0};
  const double frac = static_cast<double>(t_ms - leg.depart_ms) / static_cast<double>(leg.arrive_ms - leg.depart_ms);
  return {geo::interpolate(leg.from, leg.to, frac), leg.speed_mps};
}

geo::LatLon jitter_anchor(geo::LatLon anchor, double accuracy_m, std::uint64_t seed) {
  const auto lat_key = static_cast<std::uint64_t>(std::llround(anchor.lat * 1e7));
  const auto lon_key = static_cast<std::uint64_t>(std::llround(anchor.lon * 1e7));
  Rng rng(derive_seed(seed, fnv1a64("anchor"), lat_key, lon_key));
  const double radius = std::max(0.0, accuracy_m) * rng.uniform();
  const double angle = rng.uniform(0.0, 2.0 * geo::kPi);
  return geo::offset_m(anchor, radius * std::cos(angle), radius * std::sin(angle));
}

std::vector<SensorFrame> plan_gps_route(const std::vector<geo::LatLon>& anchors, double mode_speed_mps,
                                        const std::vector<std::int64_t>& dwell_ms, std::uint64_t seed,
                                        const RouteOptions& options) {
  if (anchors.empty()) throw Error(Errc::invalid_request, "route needs at least one anchor");
  for (const auto& a : anchors) {
    if (!geo::valid(a)) throw Error(Errc::invalid_request, "anchor coordinates out of range");
  }
  if (!(mode_speed_mps > 0.0) || !std::isfinite(mode_speed_mps)) {
    throw Error(Errc::invalid_request, "mode speed must be positive");
  }
  if (mode_speed_mps > options.max_speed_mps) {
    throw Error(Errc::speed_violates_profile, "mode speed exceeds the profile's max_speed_mps");
  }
  if (!(options.rate_hz >= 0.1 && options.rate_hz <= 100.0)) {
    throw Error(Errc::invalid_rate, "gps rate must lie in [0.1, 100] Hz");
  }
  for (auto d : dwell_ms) {
    if (d < 0) throw Error(Errc::invalid_request, "dwell must be non-negative");
  }

  Track track(jitter_anchor(anchors.front(), options.accuracy_m, seed));
  std::int64_t clock = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (i > 0) {
      track.add_leg(clock, jitter_anchor(anchors[i], options.accuracy_m, seed), mode_speed_mps);
      clock = std::max(clock, track.end_ms());
    }
    clock += i < dwell_ms.size() ? dwell_ms[i] : 0;
  }

  std::vector<SensorFrame> frames;
  for (std::int64_t i = 0;; ++i) {
    const auto t = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1000.0 / options.rate_hz));
    if (t > clock) break;
    const TrackPoint p = track.at(t);
    frames.push_back({options.start_ms + t, Channel::gps_location,
                      {p.position.lat, p.position.lon, options.accuracy_m, p.speed_mps}, {}});
  }
  return frames;
}

}  // namespace sandbox::sensor
