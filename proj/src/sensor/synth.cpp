#include "sandbox/sensor/synth.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/regions.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/common/timezone.hpp"
#include "sandbox/persona/derive.hpp"
#include "sandbox/sensor/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sandbox::sensor {
namespace {

constexpr std::int64_t kDayMs = 86'400'000;
constexpr std::int64_t kHourMs = 3'600'000;
constexpr std::uint64_t kStepStream = fnv1a64("step");
constexpr std::uint64_t kLightStream = fnv1a64("light");

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool is_motion(Channel c) {
  switch (c) {
    case Channel::accelerometer:
    case Channel::gyroscope:
    case Channel::linear_acceleration:
    case Channel::rotation_vector:
    case Channel::gravity:
    case Channel::magnetic_field:
    case Channel::orientation:
      return true;
    default:
      return false;
  }
}

std::vector<double> vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

void check_rates(const SampleRates& rates) {
  for (const auto& [channel, hz] : rates) {
    if (!is_valid(channel)) throw Error(Errc::unsupported_channel, "unknown channel in sample rates");
    if (!std::isfinite(hz) || hz < 0.1 || hz > 100.0) {
      throw Error(Errc::invalid_rate, std::string(to_string(channel)) + " rate must lie in [0.1, 100] Hz");
    }
  }
}

}  // namespace

SampleRates default_sample_rates() {
  return {
      {Channel::accelerometer, 10.0},   {Channel::gyroscope, 10.0},   {Channel::linear_acceleration, 10.0},
      {Channel::ambient_light, 1.0},    {Channel::step_counter, 1.0}, {Channel::step_detector, 1.0},
      {Channel::rotation_vector, 10.0}, {Channel::gravity, 10.0},     {Channel::magnetic_field, 10.0},
      {Channel::orientation, 10.0},     {Channel::gps_location, 0.2}, {Channel::cell_tower, 0.2},
  };
}

std::vector<std::int64_t> sample_times(double rate_hz, std::int64_t duration_ms) {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0;; ++i) {
    const auto t = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1000.0 / rate_hz));
    if (t > duration_ms) break;
    out.push_back(t);
  }
  return out;
}

std::array<double, 3> cell_for_anchor(geo::LatLon anchor) {
  const RegionTable& table = RegionTable::bundled();
  const Region* region = table.find(table.lookup(anchor));
  char key[64];
  std::snprintf(key, sizeof key, "%.3f,%.3f", anchor.lat, anchor.lon);
  const auto cell_id = static_cast<double>(fnv1a64(key) & 0x0FFFFFFFULL);
  if (!region) return {0.0, 0.0, cell_id};
  return {static_cast<double>(region->mcc), static_cast<double>(region->mnc), cell_id};
}

TraceKernels::TraceKernels(const persona::SensorProfile& profile, TraceWindow window, std::uint64_t seed,
                           std::int64_t initial_steps)
    : profile_(profile), window_(window), seed_(seed), initial_steps_(initial_steps) {
  const auto offset = tz::utc_offset_minutes(profile.timezone);
  if (!offset) throw Error(Errc::invalid_request, "unknown timezone '" + profile.timezone + "'");
  offset_min_ = *offset;

  // Steps: cadence slots thinned by the hourly probability.
  const auto prob = step_probability_by_hour(profile);
  if (profile.walking_cadence_hz > 0.0) {
    for (std::int64_t k = 1;; ++k) {
      const auto t =
          static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1000.0 / profile.walking_cadence_hz));
      if (t > window.duration_ms) break;
      const auto hour = static_cast<std::size_t>(local_hour(t)) % 24;
      if (prob[hour] <= 0.0) continue;
      Rng rng(derive_seed(seed, kStepStream, static_cast<std::uint64_t>(k)));
      if (rng.uniform() < prob[hour]) steps_.push_back(t);
    }
  }

  // Commute track, simulated from two days before the window so the position
  // at t = 0 reflects the routine rather than a cold start at home.
  home_ = jitter_anchor(profile.home, profile.gps_accuracy_m, seed);
  work_ = jitter_anchor(profile.work, profile.gps_accuracy_m, seed);
  home_cell_ = cell_for_anchor(profile.home);
  work_cell_ = cell_for_anchor(profile.work);
  track_ = Track(home_);
  if (profile.commute_mode != persona::CommuteMode::none && profile.max_speed_mps > 0.0) {
    struct Departure {
      std::int64_t t;
      std::size_t index;
      double hours;
    };
    std::vector<Departure> departures;
    const std::int64_t offset_ms = static_cast<std::int64_t>(offset_min_) * 60'000;
    const std::int64_t first_day = floor_div(window.start_ms - 2 * kDayMs + offset_ms, kDayMs);
    const std::int64_t last_day = floor_div(window.start_ms + window.duration_ms + offset_ms, kDayMs);
    for (std::int64_t day = first_day; day <= last_day; ++day) {
      for (std::size_t i = 0; i < profile.commute_windows.size(); ++i) {
        const auto& w = profile.commute_windows[i];
        const std::int64_t epoch =
            day * kDayMs + static_cast<std::int64_t>(std::llround(w.start * kHourMs)) - offset_ms;
        departures.push_back({epoch - window.start_ms, i, w.duration_hours()});
      }
    }
    std::sort(departures.begin(), departures.end(),
              [](const Departure& a, const Departure& b) { return a.t != b.t ? a.t < b.t : a.index < b.index; });
    const double cap = persona::mode_speed_cap(profile.commute_mode);
    const double typical = persona::typical_mode_speed(profile.commute_mode);
    for (const auto& d : departures) {
      const geo::LatLon dest = d.index % 2 == 0 ? work_ : home_;
      const double dist = geo::haversine_m(track_.current_end(), dest);
      const double needed = d.hours > 0 ? dist / (d.hours * 3600.0) : typical;
      const double speed = std::min({std::max(needed, typical), 0.95 * profile.max_speed_mps, cap});
      track_.add_leg(d.t, dest, speed);
    }
  }
}

double TraceKernels::local_hour(std::int64_t t_ms) const {
  return tz::local_hour(window_.start_ms + t_ms, offset_min_);
}

std::int64_t TraceKernels::step_count_at(std::int64_t t_ms) const {
  const auto n = std::upper_bound(steps_.begin(), steps_.end(), t_ms) - steps_.begin();
  return initial_steps_ + static_cast<std::int64_t>(n);
}

SensorFrame TraceKernels::sample(Channel channel, std::int64_t t_ms) const {
  SensorFrame f;
  f.t = t_ms;
  f.channel = channel;
  const double hour = local_hour(t_ms);
  if (is_motion(channel)) {
    const MotionSample m = sample_motion(profile_, hour, seed_, t_ms);
    switch (channel) {
      case Channel::accelerometer: f.values = vec(m.accel); break;
      case Channel::gyroscope: f.values = vec(m.gyro); break;
      case Channel::linear_acceleration: f.values = vec(m.linear); break;
      case Channel::gravity: f.values = vec(m.gravity); break;
      case Channel::magnetic_field: f.values = vec(m.magnetic); break;
      case Channel::orientation: f.values = vec(m.orientation_deg); break;
      case Channel::rotation_vector: f.values = {m.quaternion[0], m.quaternion[1], m.quaternion[2], m.quaternion[3]}; break;
      default: break;
    }
    return f;
  }
  switch (channel) {
    case Channel::ambient_light: {
      Rng rng(derive_seed(seed_, kLightStream, static_cast<std::uint64_t>(t_ms)));
      f.values = {std::max(0.0, exposure_lux(profile_, hour) * (1.0 + rng.normal(0.0, 0.03)))};
      break;
    }
    case Channel::step_counter:
      f.values = {static_cast<double>(step_count_at(t_ms))};
      break;
    case Channel::step_detector:
      f.values = {1.0};
      break;
    case Channel::gps_location: {
      const TrackPoint p = track_.at(t_ms);
      f.values = {p.position.lat, p.position.lon, profile_.gps_accuracy_m, p.speed_mps};
      break;
    }
    case Channel::cell_tower: {
      const geo::LatLon here = track_.at(t_ms).position;
      const bool at_home = geo::haversine_m(here, home_) <= geo::haversine_m(here, work_);
      const auto& cell = at_home ? home_cell_ : work_cell_;
      f.values = {cell[0], cell[1], cell[2]};
      break;
    }
    case Channel::system_time:
      f.values = {static_cast<double>(window_.start_ms + t_ms)};
      break;
    case Channel::time_zone:
      f.text = profile_.timezone;
      break;
    default:
      throw Error(Errc::unsupported_channel, "no kernel for channel");
  }
  return f;
}

TracePlan synthesize_trace(const persona::SensorProfile& profile, TraceWindow window, std::uint64_t seed,
                           const SampleRates& rates, const SynthOptions& options) {
  if (window.duration_ms <= 0) throw Error(Errc::invalid_window, "window duration must be positive");
  if (window.start_ms < 0) throw Error(Errc::invalid_window, "window start must be a non-negative epoch");
  check_rates(rates);
  if (!(options.clock_scale > 0.0) || !std::isfinite(options.clock_scale)) {
    throw Error(Errc::invalid_request, "clock_scale must be positive");
  }
  if (options.initial_steps < 0) throw Error(Errc::invalid_request, "initial_steps must be non-negative");

  const TraceKernels kernels(profile, window, seed, options.initial_steps);
  TracePlan plan;
  plan.persona_id = options.persona_id;
  plan.seed = seed;
  plan.window = window;
  plan.clock_scale = options.clock_scale;
  plan.initial_steps = options.initial_steps;
  plan.sample_rates = rates;

  for (const auto& [channel, hz] : rates) {
    if (channel == Channel::step_detector) {
      for (auto t : kernels.step_events()) plan.frames.push_back(kernels.sample(channel, t));
      continue;
    }
    for (auto t : sample_times(hz, window.duration_ms)) plan.frames.push_back(kernels.sample(channel, t));
  }
  for (Channel once : {Channel::system_time, Channel::time_zone}) {
    if (!rates.count(once)) plan.frames.push_back(kernels.sample(once, 0));
  }
  std::sort(plan.frames.begin(), plan.frames.end(), canonical_less);
  return plan;
}

SensorFrame sample_channel(const persona::SensorProfile& profile, Channel channel, std::int64_t t_ms,
                           std::uint64_t rng_state, std::int64_t epoch_start_ms) {
  if (!is_valid(channel)) throw Error(Errc::unsupported_channel, "unknown channel");
  if (t_ms < 0) throw Error(Errc::invalid_window, "t must be non-negative");
  const TraceKernels kernels(profile, {epoch_start_ms, std::max<std::int64_t>(t_ms, 1)}, rng_state);
  return kernels.sample(channel, t_ms);
}

}  // namespace sandbox::sensor
