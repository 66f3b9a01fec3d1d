#include "sandbox/sensor/kernels.hpp"

#include "sandbox/common/geo.hpp"
#include "sandbox/common/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sandbox::sensor {
namespace {

constexpr double kPi = geo::kPi;
constexpr std::uint64_t kMotionStream = fnv1a64("motion");
constexpr std::uint64_t kHeadingStream = fnv1a64("heading");

bool commuting(const SensorProfile& p, double h) {
  return p.commute_mode != persona::CommuteMode::none && persona::in_any(p.commute_windows, h);
}

}  // namespace

bool awake(const SensorProfile& p, double h) { return persona::HourWindow{p.wake_hour, p.sleep_hour}.contains(h); }

ActivityLevel activity_level(const SensorProfile& p, double h) {
  if (!awake(p, h)) return ActivityLevel::rest;
  if (persona::in_any(p.exercise_hours, h)) return ActivityLevel::vigorous;
  if (commuting(p, h)) {
    const bool active = p.commute_mode == persona::CommuteMode::walk || p.commute_mode == persona::CommuteMode::bike;
    return active ? ActivityLevel::moderate : ActivityLevel::light;
  }
  return ActivityLevel::light;
}

double activity_intensity(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::rest: return 0.0;
    case ActivityLevel::light: return 0.3;
    case ActivityLevel::moderate: return 0.7;
    case ActivityLevel::vigorous: return 1.0;
  }
  return 0.0;
}

double outdoor_lux(const LightCurve& c, double h) {
  const double day_length = persona::HourWindow{c.sunrise_hour, c.sunset_hour}.duration_hours();
  double since_sunrise = std::fmod(h - c.sunrise_hour, 24.0);
  if (since_sunrise < 0) since_sunrise += 24.0;
  double daylight = 0.0;
  if (since_sunrise < day_length) {
    const double u = since_sunrise / day_length;
    daylight = c.peak_lux * 0.5 * (1.0 - std::cos(2.0 * kPi * u));
  }
  return std::max(daylight, c.night_floor_lux);
}

double exposure_lux(const SensorProfile& p, double h) {
  const LightCurve& c = p.light_curve;
  if (!awake(p, h)) return c.night_floor_lux;
  const double outdoor = outdoor_lux(c, h);
  const double indoor = std::max(std::min(outdoor, c.indoor_clamp_lux), c.artificial_lux);
  const double screen = persona::in_any(p.screen_time_windows, h) ? c.screen_lux : 0.0;
  return (1.0 - c.indoor_fraction) * outdoor + c.indoor_fraction * indoor + screen;
}

std::array<double, 24> step_probability_by_hour(const SensorProfile& p) {
  std::array<double, 24> share{};
  double total = 0.0;
  for (int h = 0; h < 24; ++h) {
    const double mid = h + 0.5;
    double s = 0.0;
    if (awake(p, mid)) {
      if (persona::in_any(p.exercise_hours, mid)) {
        s = 6.0;
      } else if (commuting(p, mid)) {
        s = p.commute_mode == persona::CommuteMode::walk ? 3.0 : 0.5;
      } else {
        s = std::max(0.0, p.active_hour_weights[static_cast<std::size_t>(h)]);
      }
    }
    share[static_cast<std::size_t>(h)] = s;
    total += s;
  }
  std::array<double, 24> prob{};
  if (!(total > 0.0) || p.daily_step_target <= 0 || !(p.walking_cadence_hz > 0.0)) return prob;
  const double slots_per_hour = p.walking_cadence_hz * 3600.0;
  for (std::size_t h = 0; h < 24; ++h) {
    prob[h] = std::min(1.0, p.daily_step_target * share[h] / total / slots_per_hour);
  }
  return prob;
}

MotionSample sample_motion(const SensorProfile& p, double h, std::uint64_t seed, std::int64_t t_ms) {
  Rng rng(derive_seed(seed, kMotionStream, static_cast<std::uint64_t>(t_ms)));
  const ActivityLevel level = activity_level(p, h);
  const double sigma = std::sqrt(std::max(0.0, p.variance(level)));
  const double drift = p.accel_drift_rate * activity_intensity(level) * h;

  MotionSample m{};
  const double tilt_sigma_deg = 0.2 + 2.0 * sigma;
  const double pitch = geo::deg2rad(std::clamp(rng.normal(0.0, tilt_sigma_deg), -89.0, 89.0));
  const double roll = geo::deg2rad(std::clamp(rng.normal(0.0, tilt_sigma_deg), -89.0, 89.0));

  // Slow heading wander plus per-sample jitter.
  Rng heading_rng(derive_seed(seed, kHeadingStream));
  const double base_heading = heading_rng.uniform(0.0, 360.0);
  const double phase = heading_rng.uniform(0.0, 2.0 * kPi);
  const double t_s = static_cast<double>(t_ms) / 1000.0;
  double heading = base_heading + 20.0 * std::sin(2.0 * kPi * t_s / 3600.0 + phase) + rng.normal(0.0, 1.0 + 3.0 * sigma);
  heading = std::fmod(heading, 360.0);
  if (heading < 0) heading += 360.0;

  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  m.gravity = {kStandardGravity * cp * sr, -kStandardGravity * sp, kStandardGravity * cp * cr};
  m.linear = {rng.normal(0.0, sigma) + drift, rng.normal(0.0, sigma), rng.normal(0.0, sigma)};
  for (std::size_t i = 0; i < 3; ++i) m.accel[i] = m.gravity[i] + m.linear[i];

  const double gyro_sigma = 0.02 + 0.15 * sigma;
  m.gyro = {rng.normal(0.0, gyro_sigma), rng.normal(0.0, gyro_sigma), rng.normal(0.0, gyro_sigma)};

  m.orientation_deg = {heading, geo::rad2deg(pitch), geo::rad2deg(roll)};

  // ZYX (yaw, pitch, roll) to quaternion, then renormalized.
  const double yaw = geo::deg2rad(heading);
  const double cy = std::cos(yaw / 2), sy = std::sin(yaw / 2);
  const double cph = std::cos(pitch / 2), sph = std::sin(pitch / 2);
  const double crh = std::cos(roll / 2), srh = std::sin(roll / 2);
  std::array<double, 4> q{
      srh * cph * cy - crh * sph * sy,
      crh * sph * cy + srh * cph * sy,
      crh * cph * sy - srh * sph * cy,
      crh * cph * cy + srh * sph * sy,
  };
  const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  for (auto& x : q) x /= norm;
  m.quaternion = q;

  // Dipole-model inclination from the home latitude; horizontal part turns with heading.
  const double inclination = std::atan(2.0 * std::tan(geo::deg2rad(p.home.lat)));
  const double magnitude = std::clamp(p.mag_field_ut * (1.0 + rng.normal(0.0, 0.005)), 20.0, 70.0);
  const double horizontal = std::cos(inclination);
  const std::array<double, 3> dir{horizontal * std::sin(-yaw), horizontal * std::cos(-yaw), -std::sin(inclination)};
  const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  for (std::size_t i = 0; i < 3; ++i) m.magnetic[i] = magnitude * dir[i] / dn;
  return m;
}

}  // namespace sandbox::sensor
