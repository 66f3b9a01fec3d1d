#pragma once

#include "sandbox/persona/persona.hpp"

#include <cstdint>
#include <string>

namespace sandbox::persona {

struct Demographics {
  int age = 30;
  geo::LatLon location;
  std::string timezone = "UTC";
};

struct StepBand {
  int min_freq;  // inclusive exercise sessions per week
  int max_freq;
  int lo;        // steps/day
  int hi;
};

// Lifestyle -> sensor parameter table. Defaults are documented in
// docs/mapping.md; every value is configuration, not physics.
struct MappingTable {
  StepBand sedentary{0, 1, 2000, 5000};
  StepBand moderate{2, 4, 5000, 9000};
  StepBand active{5, 10, 9000, 14000};

  double cadence_base_hz = 1.65;
  double cadence_per_session = 0.04;
  double cadence_senior_penalty = 0.15;

  double variance_rest = 0.0025;
  double variance_light = 0.15;
  double variance_moderate = 1.1;
  double variance_vigorous = 3.8;

  double drift_base = 0.004;
  double drift_per_session = 0.003;

  double peak_lux = 32000.0;
  double sunrise_hour = 6.0;
  double sunset_hour = 20.0;
  double indoor_clamp_lux = 300.0;
  double artificial_lux = 120.0;
  double urban_indoor_bonus = 0.1;
  double night_floor_lux = 0.5;

  double weight_asleep = 0.02;
  double weight_awake = 0.2;
  double weight_active_commute = 0.3;
  double weight_passive_commute = 0.15;
  double weight_screen = 0.3;
  double weight_exercise = 0.6;
};

const MappingTable& default_mapping();

double mode_speed_cap(CommuteMode mode);       // m/s, plausibility ceiling
double typical_mode_speed(CommuteMode mode);   // m/s, cruising speed

const StepBand& step_band(const MappingTable& table, int exercise_freq_per_week);

// Throws Error(invalid_lifestyle) when the lifestyle cannot be mapped.
SensorProfile derive_sensor_profile(const LifestyleProfile& lifestyle, const Demographics& demographics,
                                    std::uint64_t seed, const MappingTable& table = default_mapping());

}  // namespace sandbox::persona
