#pragma once

// Personas that each break exactly one validation rule.

#include "sandbox/common/geo.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/persona/generate.hpp"
#include "sandbox/persona/persona.hpp"

#include <string>

namespace fixtures {

using namespace sandbox::persona;

inline Persona make(std::uint64_t seed, const std::string& hints_json = "{}") {
  PersonaRequest r;
  r.seed = seed;
  r.hints = parse_hints(sandbox::Json::parse(hints_json));
  return generate_persona(r);
}

// Keeps the sensor copies in step after editing lifestyle hours.
inline void sync_copies(Persona& p) {
  auto& s = p.sensor_profile;
  const auto& l = p.lifestyle;
  s.wake_hour = l.wake_hour;
  s.sleep_hour = l.sleep_hour;
  s.exercise_hours = l.exercise_hours;
  s.screen_time_windows = l.screen_time_windows;
  s.commute_windows = l.commute_windows;
  s.commute_mode = l.commute_mode;
}

inline Persona night_worker() { return make(5, R"({"shift":"night"})"); }

inline Persona rule_fixture(const std::string& rule_id) {
  if (rule_id == "R1") {
    Persona p = night_worker();
    p.sensor_profile.active_hour_weights[7] = 1.0;
    return p;
  }
  Persona p = make(0);
  if (rule_id == "R2") {
    p.lifestyle.commute_mode = CommuteMode::walk;
    p.lifestyle.commute_windows = {{8.0, 8.0 + 20.0 / 60.0}, {17.0, 17.0 + 20.0 / 60.0}};
    sync_copies(p);
    p.sensor_profile.max_speed_mps = 3.0;
    p.sensor_profile.work = sandbox::geo::destination(p.sensor_profile.home, 90.0, 40000.0);
  } else if (rule_id == "R3") {
    p.lifestyle.shift_type = ShiftType::day;
    p.lifestyle.wake_hour = 13.0;
    p.lifestyle.sleep_hour = 2.0;
    sync_copies(p);
  } else if (rule_id == "R4") {
    p.sensor_profile.daily_step_target = 25000;
  } else if (rule_id == "R5") {
    p.age = 200;
  } else if (rule_id == "R6") {
    p.sensor_profile.wake_hour = p.lifestyle.wake_hour + 0.5;
  }
  return p;
}

// Up to three random edits across the fields the rules look at.
inline void mutate_persona(Persona& p, sandbox::Rng& rng) {
  const int mutations = static_cast<int>(rng.uniform_int(0, 3));
  for (int m = 0; m < mutations; ++m) {
    auto& l = p.lifestyle;
    auto& s = p.sensor_profile;
    switch (rng.uniform_int(0, 17)) {
      case 0: p.age = static_cast<int>(rng.uniform_int(0, 130)); break;
      case 1: s.active_hour_weights[static_cast<std::size_t>(rng.uniform_int(0, 23))] = rng.uniform(0, 1.2); break;
      case 2: l.shift_type = static_cast<ShiftType>(rng.uniform_int(0, 2)); break;
      case 3: l.wake_hour = rng.uniform_int(0, 25); break;
      case 4: l.sleep_hour = rng.uniform_int(0, 24); sync_copies(p); break;
      case 5: s.daily_step_target = static_cast<int>(rng.uniform_int(-100, 30000)); break;
      case 6: l.exercise_freq_per_week = static_cast<int>(rng.uniform_int(-1, 25)); break;
      case 7: s.work = sandbox::geo::destination(s.home, rng.uniform(0, 360), rng.uniform(0, 80000)); break;
      case 8: l.commute_mode = static_cast<CommuteMode>(rng.uniform_int(0, 4)); break;
      case 9: s.max_speed_mps = rng.uniform(-1, 90); break;
      case 10: s.walking_cadence_hz = rng.uniform(0, 4); break;
      case 11: s.mag_field_ut = rng.uniform(10, 80); break;
      case 12: l.commute_windows = {{rng.uniform(0, 24), rng.uniform(0, 24)}}; break;
      case 13: s.timezone = rng.bernoulli(0.5) ? "Mars/Base" : "UTC"; break;
      case 14: s.gps_accuracy_m = rng.uniform(-5, 120); break;
      case 15: s.light_curve.peak_lux = rng.uniform(-100, 200000); break;
      case 16: s.accel_variance_by_activity.erase(static_cast<ActivityLevel>(rng.uniform_int(0, 3))); break;
      case 17: sync_copies(p); break;
    }
  }
}

}  // namespace fixtures
