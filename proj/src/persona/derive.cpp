#include "sandbox/persona/derive.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/common/timezone.hpp"

#include <algorithm>
#include <cmath>

namespace sandbox::persona {
namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

bool awake_at(double wake, double sleep, double hour) { return HourWindow{wake, sleep}.contains(hour); }

double screen_hours(const std::vector<HourWindow>& windows) {
  double total = 0.0;
  for (const auto& w : windows) total += w.duration_hours();
  return total;
}

void check_lifestyle(const LifestyleProfile& l) {
  auto fail = [](const std::string& why) { throw Error(Errc::invalid_lifestyle, why); };
  if (!std::isfinite(l.daily_mobility_km) || l.daily_mobility_km < 0.0 || l.daily_mobility_km > 500.0) {
    fail("daily_mobility_km must be in [0, 500]");
  }
  if (l.exercise_freq_per_week < 0) fail("exercise_freq_per_week must be non-negative");
  if (!(l.wake_hour >= 0.0 && l.wake_hour < 24.0) || !(l.sleep_hour >= 0.0 && l.sleep_hour < 24.0) ||
      l.wake_hour == l.sleep_hour) {
    fail("wake_hour/sleep_hour must be distinct hours in [0, 24)");
  }
  if (!(l.indoor_fraction >= 0.0 && l.indoor_fraction <= 1.0)) fail("indoor_fraction must be in [0, 1]");
  for (const auto* list : {&l.exercise_hours, &l.screen_time_windows, &l.commute_windows}) {
    for (const auto& w : *list) {
      if (!w.well_formed()) fail("hour window is malformed");
    }
  }
}

}  // namespace

const MappingTable& default_mapping() {
  static const MappingTable table{};
  return table;
}

double mode_speed_cap(CommuteMode mode) {
  switch (mode) {
    case CommuteMode::walk: return 3.0;
    case CommuteMode::bike: return 12.0;
    case CommuteMode::transit:
    case CommuteMode::car: return 70.0;
    case CommuteMode::none: return 3.0;
  }
  return 3.0;
}

double typical_mode_speed(CommuteMode mode) {
  switch (mode) {
    case CommuteMode::walk: return 1.3;
    case CommuteMode::bike: return 4.5;
    case CommuteMode::transit: return 7.0;
    case CommuteMode::car: return 9.0;
    case CommuteMode::none: return 1.3;
  }
  return 1.3;
}

const StepBand& step_band(const MappingTable& table, int freq) {
  if (freq <= table.sedentary.max_freq) return table.sedentary;
  if (freq <= table.moderate.max_freq) return table.moderate;
  return table.active;
}

SensorProfile derive_sensor_profile(const LifestyleProfile& l, const Demographics& d, std::uint64_t seed,
                                    const MappingTable& t) {
  check_lifestyle(l);
  if (!geo::valid(d.location)) throw Error(Errc::invalid_lifestyle, "location out of range");
  if (!tz::known(d.timezone)) throw Error(Errc::invalid_lifestyle, "unknown timezone '" + d.timezone + "'");

  Rng rng(derive_seed(seed, fnv1a64("derive_sensor_profile")));
  const double step_jitter = rng.uniform();
  const double cadence_jitter = rng.uniform(-0.03, 0.03);
  const double variance_jitter = rng.uniform(0.97, 1.03);
  const double bearing = rng.uniform(0.0, 360.0);
  const double mag_jitter = rng.uniform(-1.0, 1.0);

  const int sessions = std::min(l.exercise_freq_per_week, 7);

  SensorProfile s;

  // Steps: position inside the exercise band from mobility, frequency and a
  // seeded jitter. Bands are ordered so more exercise never lowers the target.
  const StepBand& band = step_band(t, l.exercise_freq_per_week);
  const double mobility_factor = l.daily_mobility_km / (l.daily_mobility_km + 8.0);
  const int clamped_freq = std::clamp(l.exercise_freq_per_week, band.min_freq, band.max_freq);
  const double freq_factor = band.max_freq == band.min_freq
                                 ? 0.0
                                 : static_cast<double>(clamped_freq - band.min_freq) / (band.max_freq - band.min_freq);
  const double position = 0.6 * mobility_factor + 0.25 * freq_factor + 0.15 * step_jitter;
  s.daily_step_target = static_cast<int>(round_to(band.lo + (band.hi - band.lo) * position, 10.0));

  double cadence = t.cadence_base_hz + t.cadence_per_session * sessions + cadence_jitter;
  if (d.age > 60) cadence -= t.cadence_senior_penalty;
  s.walking_cadence_hz = round_to(std::clamp(cadence, 0.5, 3.5), 0.01);

  const double fitness_scale = (0.7 + 0.08 * sessions) * variance_jitter;
  s.accel_variance_by_activity = {
      {ActivityLevel::rest, t.variance_rest},
      {ActivityLevel::light, round_to(t.variance_light * fitness_scale, 1e-4)},
      {ActivityLevel::moderate, round_to(t.variance_moderate * fitness_scale, 1e-4)},
      {ActivityLevel::vigorous, round_to(t.variance_vigorous * fitness_scale, 1e-4)},
  };
  s.accel_drift_rate = round_to(t.drift_base + t.drift_per_session * sessions, 1e-4);

  LightCurve& lc = s.light_curve;
  lc.peak_lux = t.peak_lux;
  lc.sunrise_hour = t.sunrise_hour;
  lc.sunset_hour = t.sunset_hour;
  if (l.shift_type == ShiftType::night) {
    lc.sunrise_hour = std::fmod(lc.sunrise_hour + 12.0, 24.0);
    lc.sunset_hour = std::fmod(lc.sunset_hour + 12.0, 24.0);
  }
  lc.indoor_clamp_lux = t.indoor_clamp_lux;
  lc.artificial_lux = t.artificial_lux;
  lc.screen_lux = round_to(std::min(200.0, 40.0 + 20.0 * screen_hours(l.screen_time_windows)), 1.0);
  lc.night_floor_lux = t.night_floor_lux;
  const double indoor_bonus = l.environment == Environment::urban ? t.urban_indoor_bonus : 0.0;
  lc.indoor_fraction = round_to(std::clamp(l.indoor_fraction + indoor_bonus, 0.0, 0.98), 1e-4);

  const double sin_lat = std::sin(geo::deg2rad(d.location.lat));
  s.mag_field_ut = round_to(std::clamp(30.0 * std::sqrt(1.0 + 3.0 * sin_lat * sin_lat) + mag_jitter, 20.0, 70.0), 0.1);

  s.max_speed_mps = mode_speed_cap(l.commute_mode);
  s.home = d.location;
  if (l.commute_mode == CommuteMode::none || l.daily_mobility_km <= 0.0) {
    s.work = d.location;
  } else {
    const geo::LatLon w = geo::destination(d.location, bearing, l.daily_mobility_km * 500.0);
    s.work = {round_to(w.lat, 1e-6), round_to(w.lon, 1e-6)};
  }
  s.timezone = d.timezone;

  const bool active_commute = l.commute_mode == CommuteMode::walk || l.commute_mode == CommuteMode::bike;
  double max_weight = 0.0;
  for (int h = 0; h < 24; ++h) {
    const double mid = h + 0.5;
    double w = t.weight_asleep;
    if (awake_at(l.wake_hour, l.sleep_hour, mid)) {
      w = t.weight_awake;
      if (l.commute_mode != CommuteMode::none && in_any(l.commute_windows, mid)) {
        w += active_commute ? t.weight_active_commute : t.weight_passive_commute;
      }
      if (in_any(l.screen_time_windows, mid)) w += t.weight_screen;
      if (in_any(l.exercise_hours, mid)) w += t.weight_exercise;
    }
    s.active_hour_weights[static_cast<std::size_t>(h)] = w;
    max_weight = std::max(max_weight, w);
  }
  for (auto& w : s.active_hour_weights) w = round_to(w / max_weight, 1e-4);

  s.wake_hour = l.wake_hour;
  s.sleep_hour = l.sleep_hour;
  s.exercise_hours = l.exercise_hours;
  s.screen_time_windows = l.screen_time_windows;
  s.commute_windows = l.commute_windows;
  s.commute_mode = l.commute_mode;
  s.gps_accuracy_m = l.environment == Environment::urban ? 8.0 : 5.0;
  return s;
}

}  // namespace sandbox::persona
