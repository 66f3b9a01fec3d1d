#pragma once

#include "sandbox/common/geo.hpp"
#include "sandbox/common/json.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sandbox::persona {

inline constexpr int kSchemaVersion = 1;

// Local-hour interval [start, end); end < start wraps past midnight.
struct HourWindow {
  double start = 0.0;
  double end = 0.0;

  bool well_formed() const;
  bool contains(double hour) const;
  double duration_hours() const;

  friend bool operator==(const HourWindow&, const HourWindow&) = default;
};

bool in_any(const std::vector<HourWindow>& windows, double hour);

enum class CommuteMode { walk, bike, transit, car, none };
enum class ShiftType { day, night, rotating };
enum class Environment { urban, rural };
enum class IncomeBracket { low, lower_middle, middle, upper_middle, high };
enum class ActivityLevel { rest, light, moderate, vigorous };

inline constexpr std::array<ActivityLevel, 4> kActivityLevels{
    ActivityLevel::rest, ActivityLevel::light, ActivityLevel::moderate, ActivityLevel::vigorous};

std::string_view to_string(CommuteMode m);
std::string_view to_string(ShiftType s);
std::string_view to_string(Environment e);
std::string_view to_string(IncomeBracket b);
std::string_view to_string(ActivityLevel a);

std::optional<CommuteMode> parse_commute_mode(std::string_view s);
std::optional<ShiftType> parse_shift_type(std::string_view s);
std::optional<Environment> parse_environment(std::string_view s);
std::optional<IncomeBracket> parse_income_bracket(std::string_view s);
std::optional<ActivityLevel> parse_activity_level(std::string_view s);

struct Location {
  std::string name;
  geo::LatLon coords;

  friend bool operator==(const Location&, const Location&) = default;
};

struct LifestyleProfile {
  CommuteMode commute_mode = CommuteMode::none;
  double daily_mobility_km = 0.0;
  int exercise_freq_per_week = 0;
  std::vector<HourWindow> exercise_hours;
  double wake_hour = 7.0;
  double sleep_hour = 23.0;
  std::vector<HourWindow> screen_time_windows;
  // Outbound leg first, return leg second.
  std::vector<HourWindow> commute_windows;
  ShiftType shift_type = ShiftType::day;
  Environment environment = Environment::urban;
  double indoor_fraction = 0.8;

  friend bool operator==(const LifestyleProfile&, const LifestyleProfile&) = default;
};

struct LightCurve {
  double peak_lux = 30000.0;
  double sunrise_hour = 6.0;
  double sunset_hour = 20.0;
  double indoor_clamp_lux = 300.0;
  double artificial_lux = 120.0;
  double screen_lux = 60.0;
  double night_floor_lux = 0.5;
  double indoor_fraction = 0.8;

  friend bool operator==(const LightCurve&, const LightCurve&) = default;
};

struct SensorProfile {
  std::map<ActivityLevel, double> accel_variance_by_activity;
  double accel_drift_rate = 0.0;
  int daily_step_target = 0;
  double walking_cadence_hz = 1.8;
  LightCurve light_curve;
  double mag_field_ut = 45.0;
  double max_speed_mps = 3.0;
  geo::LatLon home;
  geo::LatLon work;
  std::string timezone = "UTC";
  std::array<double, 24> active_hour_weights{};
  // Temporal traits carried over from the lifestyle so the trace kernels need
  // nothing but this block.
  double wake_hour = 7.0;
  double sleep_hour = 23.0;
  std::vector<HourWindow> exercise_hours;
  std::vector<HourWindow> screen_time_windows;
  std::vector<HourWindow> commute_windows;
  CommuteMode commute_mode = CommuteMode::none;
  double gps_accuracy_m = 8.0;

  double variance(ActivityLevel level) const;

  friend bool operator==(const SensorProfile&, const SensorProfile&) = default;
};

struct Persona {
  std::string id;
  std::string name;
  int age = 30;
  std::string gender;
  Location location;
  std::string occupation;
  IncomeBracket income_bracket = IncomeBracket::middle;
  LifestyleProfile lifestyle;
  SensorProfile sensor_profile;
  std::string summary;
  std::optional<std::string> portrait_ref;

  friend bool operator==(const Persona&, const Persona&) = default;
};

// Canonical field order; to_json(from_json(x)) is byte-stable.
Json to_json(const HourWindow& w);
Json to_json(const LifestyleProfile& l);
Json to_json(const LightCurve& c);
Json to_json(const SensorProfile& s);
Json to_json(const Persona& p);

// Throw Error(parse_error) naming the offending field.
HourWindow hour_window_from_json(const Json& j);
LifestyleProfile lifestyle_from_json(const Json& j);
SensorProfile sensor_profile_from_json(const Json& j);
Persona persona_from_json(const Json& j);

std::string serialize(const Persona& p);
Persona parse_persona(std::string_view text);

Persona load_persona(const std::string& path);
void save_persona(const Persona& p, const std::string& path);

}  // namespace sandbox::persona
