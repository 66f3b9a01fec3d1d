#include "sandbox/persona/validate.hpp"

#include "sandbox/common/timezone.hpp"
#include "sandbox/persona/derive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sandbox::persona {
namespace {

class Collector {
 public:
  void error(const char* rule_id, std::string message) { add(rule_id, Severity::error, std::move(message)); }
  void warning(const char* rule_id, std::string message) { add(rule_id, Severity::warning, std::move(message)); }

  ValidationReport finish() && {
    report_.ok = std::none_of(report_.violations.begin(), report_.violations.end(),
                              [](const Violation& v) { return v.severity == Severity::error; });
    return std::move(report_);
  }

 private:
  void add(const char* rule_id, Severity sev, std::string message) {
    report_.violations.push_back({rule_id, sev, std::move(message)});
  }
  ValidationReport report_;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

bool hour_ok(double h) { return std::isfinite(h) && h >= 0.0 && h < 24.0; }
bool in_range(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

void check_night_shift_morning(const Persona& p, Collector& out) {
  if (p.lifestyle.shift_type != ShiftType::night) return;
  const auto& w = p.sensor_profile.active_hour_weights;
  const double peak = *std::max_element(w.begin(), w.end());
  if (!(peak > 0.0)) return;  // reported by R5
  for (int h = 5; h < 10; ++h) {
    const double rel = w[static_cast<std::size_t>(h)] / peak;
    if (rel >= kNightShiftMorningThreshold) {
      out.error(rule::kNightShiftMorning, "night-shift persona has high activity at " + std::to_string(h) +
                                              ":00 (" + fmt(rel) + " of peak)");
      return;
    }
  }
}

void check_gps_speed(const Persona& p, Collector& out) {
  const auto& l = p.lifestyle;
  const auto& s = p.sensor_profile;
  if (l.commute_mode == CommuteMode::none) return;
  if (!geo::valid(s.home) || !geo::valid(s.work)) return;  // R5
  const double distance = geo::haversine_m(s.home, s.work);
  if (l.commute_windows.empty()) {
    if (distance > 0.0) {
      out.warning(rule::kGpsSpeed, "commute mode set but no commute window; speed not checked");
    }
    return;
  }
  const double cap = std::min(mode_speed_cap(l.commute_mode), s.max_speed_mps);
  for (const auto& w : l.commute_windows) {
    if (!w.well_formed()) continue;  // R5
    const double speed = distance / (w.duration_hours() * 3600.0);
    if (speed > cap) {
      out.error(rule::kGpsSpeed, "commute of " + fmt(distance / 1000.0) + " km in " +
                                     fmt(w.duration_hours() * 60.0) + " min implies " + fmt(speed) +
                                     " m/s, above the " + std::string(to_string(l.commute_mode)) + " limit of " +
                                     fmt(cap) + " m/s");
      return;
    }
  }
}

void check_sleep_schedule(const Persona& p, Collector& out) {
  const auto& l = p.lifestyle;
  if (!hour_ok(l.wake_hour) || !hour_ok(l.sleep_hour) || l.wake_hour == l.sleep_hour) return;  // R5
  const double awake = HourWindow{l.wake_hour, l.sleep_hour}.duration_hours();
  if (awake < 12.0 || awake > 20.0) {
    out.error(rule::kSleepSchedule, "awake span of " + fmt(awake) + " h is outside [12, 20] h");
    return;
  }
  switch (l.shift_type) {
    case ShiftType::day:
      if (!(l.wake_hour >= 4.0 && l.wake_hour < 12.0) || !(l.sleep_hour >= 19.0 || l.sleep_hour < 4.0)) {
        out.error(rule::kSleepSchedule, "day-shift schedule expects waking in [04:00, 12:00) and sleeping in "
                                        "[19:00, 04:00)");
      }
      break;
    case ShiftType::night:
      if (!(l.wake_hour >= 12.0 && l.wake_hour < 22.0) || !(l.sleep_hour >= 5.0 && l.sleep_hour < 14.0)) {
        out.error(rule::kSleepSchedule, "night-shift schedule expects waking in [12:00, 22:00) and sleeping in "
                                        "[05:00, 14:00)");
      }
      break;
    case ShiftType::rotating:
      break;
  }
}

void check_step_target(const Persona& p, Collector& out) {
  const int freq = p.lifestyle.exercise_freq_per_week;
  const int target = p.sensor_profile.daily_step_target;
  if (freq < 0 || target < 0) return;  // R5
  const int cap = freq <= 1 ? 5000 : freq <= 4 ? 9000 : 20000;
  if (target > cap) {
    out.error(rule::kStepTarget, "daily step target " + std::to_string(target) + " exceeds " + std::to_string(cap) +
                                     " for " + std::to_string(freq) + " exercise sessions/week");
  } else if (freq >= 5 && target < 5000) {
    out.error(rule::kStepTarget, "daily step target " + std::to_string(target) + " is implausibly low for " +
                                     std::to_string(freq) + " exercise sessions/week");
  }
}

void check_field_ranges(const Persona& p, Collector& out) {
  const auto& l = p.lifestyle;
  const auto& s = p.sensor_profile;
  auto bad = [&](const std::string& what) { out.error(rule::kFieldRange, what); };

  if (p.age < 13 || p.age > 100) bad("age " + std::to_string(p.age) + " outside [13, 100]");
  if (!geo::valid(p.location.coords)) bad("location coordinates out of range");
  if (!in_range(l.daily_mobility_km, 0.0, 500.0)) bad("daily_mobility_km outside [0, 500]");
  if (l.exercise_freq_per_week < 0 || l.exercise_freq_per_week > 21) bad("exercise_freq_per_week outside [0, 21]");
  if (!hour_ok(l.wake_hour) || !hour_ok(l.sleep_hour) || l.wake_hour == l.sleep_hour) {
    bad("wake_hour/sleep_hour must be distinct hours in [0, 24)");
  }
  if (!in_range(l.indoor_fraction, 0.0, 1.0)) bad("indoor_fraction outside [0, 1]");
  for (const auto* list : {&l.exercise_hours, &l.screen_time_windows, &l.commute_windows, &s.exercise_hours,
                           &s.screen_time_windows, &s.commute_windows}) {
    for (const auto& w : *list) {
      if (!w.well_formed()) {
        bad("malformed hour window [" + fmt(w.start) + ", " + fmt(w.end) + "]");
        break;
      }
    }
  }
  if (!in_range(s.walking_cadence_hz, 0.5, 3.5)) bad("walking_cadence_hz outside [0.5, 3.5]");
  if (!(std::isfinite(s.max_speed_mps) && s.max_speed_mps > 0.0 && s.max_speed_mps <= 70.0)) {
    bad("max_speed_mps outside (0, 70]");
  }
  if (!in_range(s.mag_field_ut, 20.0, 70.0)) bad("mag_field_ut outside [20, 70]");
  double weight_sum = 0.0;
  bool weights_ok = true;
  for (double w : s.active_hour_weights) {
    if (!std::isfinite(w) || w < 0.0) weights_ok = false;
    weight_sum += w;
  }
  if (!weights_ok || !(weight_sum > 0.0)) bad("active_hour_weights must be non-negative with a positive sum");
  if (s.daily_step_target < 0) bad("daily_step_target must be non-negative");
  for (auto level : kActivityLevels) {
    if (!s.accel_variance_by_activity.count(level) || !in_range(s.variance(level), 0.0, 1e3)) {
      bad("accel variance for " + std::string(to_string(level)) + " must be present, finite and in [0, 1000]");
      break;
    }
  }
  if (!in_range(s.accel_drift_rate, 0.0, 10.0)) bad("accel_drift_rate outside [0, 10]");
  const auto& lc = s.light_curve;
  if (!in_range(lc.peak_lux, 0.0, 150000.0) || !in_range(lc.indoor_clamp_lux, 0.0, 150000.0) ||
      !in_range(lc.artificial_lux, 0.0, 150000.0) || !in_range(lc.screen_lux, 0.0, 150000.0) ||
      !in_range(lc.night_floor_lux, 0.0, 150000.0)) {
    bad("light curve lux values must lie in [0, 150000]");
  }
  if (!hour_ok(lc.sunrise_hour) || !hour_ok(lc.sunset_hour) || lc.sunrise_hour == lc.sunset_hour) {
    bad("light curve sunrise/sunset must be distinct hours in [0, 24)");
  }
  if (!in_range(lc.indoor_fraction, 0.0, 1.0)) bad("light curve indoor_fraction outside [0, 1]");
  if (!tz::known(s.timezone)) bad("unknown timezone '" + s.timezone + "'");
  if (!geo::valid(s.home) || !geo::valid(s.work)) bad("home/work anchors out of range");
  if (!(std::isfinite(s.gps_accuracy_m) && s.gps_accuracy_m > 0.0 && s.gps_accuracy_m <= 100.0)) {
    bad("gps_accuracy_m outside (0, 100]");
  }
}

void check_profile_consistency(const Persona& p, Collector& out) {
  const auto& l = p.lifestyle;
  const auto& s = p.sensor_profile;
  if (s.wake_hour != l.wake_hour || s.sleep_hour != l.sleep_hour) {
    out.error(rule::kProfileConsistency, "sensor profile wake/sleep hours differ from lifestyle");
  } else if (s.exercise_hours != l.exercise_hours || s.screen_time_windows != l.screen_time_windows ||
             s.commute_windows != l.commute_windows) {
    out.error(rule::kProfileConsistency, "sensor profile hour windows differ from lifestyle");
  } else if (s.commute_mode != l.commute_mode) {
    out.error(rule::kProfileConsistency, "sensor profile commute mode differs from lifestyle");
  }
}

}  // namespace

bool ValidationReport::has_rule(std::string_view rule_id) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule_id == rule_id; });
}

ValidationReport validate_persona(const Persona& p) {
  Collector out;
  check_night_shift_morning(p, out);
  check_gps_speed(p, out);
  check_sleep_schedule(p, out);
  check_step_target(p, out);
  check_field_ranges(p, out);
  check_profile_consistency(p, out);
  return std::move(out).finish();
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["ruleset"] = kRulesetVersion;
  j["ok"] = r.ok;
  Json arr = Json::array();
  for (const auto& v : r.violations) {
    Json e;
    e["rule_id"] = v.rule_id;
    e["severity"] = v.severity == Severity::error ? "error" : "warning";
    e["message"] = v.message;
    arr.push_back(e);
  }
  j["violations"] = arr;
  return j;
}

}  // namespace sandbox::persona
