#include "sandbox/persona/persona.hpp"

#include "sandbox/common/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sandbox::persona {

bool HourWindow::well_formed() const {
  return std::isfinite(start) && std::isfinite(end) && start >= 0.0 && start < 24.0 && end >= 0.0 &&
         end <= 24.0 && start != end && !(start == 0.0 && end == 24.0);
}

bool HourWindow::contains(double hour) const {
  if (start < end) return hour >= start && hour < end;
  return hour >= start || hour < end;
}

double HourWindow::duration_hours() const {
  const double d = end - start;
  return d > 0 ? d : d + 24.0;
}

bool in_any(const std::vector<HourWindow>& windows, double hour) {
  for (const auto& w : windows) {
    if (w.contains(hour)) return true;
  }
  return false;
}

std::string_view to_string(CommuteMode m) {
  switch (m) {
    case CommuteMode::walk: return "walk";
    case CommuteMode::bike: return "bike";
    case CommuteMode::transit: return "transit";
    case CommuteMode::car: return "car";
    case CommuteMode::none: return "none";
  }
  return "none";
}

std::string_view to_string(ShiftType s) {
  switch (s) {
    case ShiftType::day: return "day";
    case ShiftType::night: return "night";
    case ShiftType::rotating: return "rotating";
  }
  return "day";
}

std::string_view to_string(Environment e) { return e == Environment::urban ? "urban" : "rural"; }

std::string_view to_string(IncomeBracket b) {
  switch (b) {
    case IncomeBracket::low: return "low";
    case IncomeBracket::lower_middle: return "lower_middle";
    case IncomeBracket::middle: return "middle";
    case IncomeBracket::upper_middle: return "upper_middle";
    case IncomeBracket::high: return "high";
  }
  return "middle";
}

std::string_view to_string(ActivityLevel a) {
  switch (a) {
    case ActivityLevel::rest: return "rest";
    case ActivityLevel::light: return "light";
    case ActivityLevel::moderate: return "moderate";
    case ActivityLevel::vigorous: return "vigorous";
  }
  return "rest";
}

std::optional<CommuteMode> parse_commute_mode(std::string_view s) {
  for (auto m : {CommuteMode::walk, CommuteMode::bike, CommuteMode::transit, CommuteMode::car, CommuteMode::none}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<ShiftType> parse_shift_type(std::string_view s) {
  for (auto v : {ShiftType::day, ShiftType::night, ShiftType::rotating}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Environment> parse_environment(std::string_view s) {
  for (auto v : {Environment::urban, Environment::rural}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<IncomeBracket> parse_income_bracket(std::string_view s) {
  for (auto v : {IncomeBracket::low, IncomeBracket::lower_middle, IncomeBracket::middle, IncomeBracket::upper_middle,
                 IncomeBracket::high}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<ActivityLevel> parse_activity_level(std::string_view s) {
  for (auto v : kActivityLevels) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

double SensorProfile::variance(ActivityLevel level) const {
  const auto it = accel_variance_by_activity.find(level);
  return it == accel_variance_by_activity.end() ? 0.0 : it->second;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json windows_json(const std::vector<HourWindow>& ws) {
  Json arr = Json::array();
  for (const auto& w : ws) arr.push_back(to_json(w));
  return arr;
}

Json latlon_json(geo::LatLon p) {
  Json j;
  j["lat"] = p.lat;
  j["lon"] = p.lon;
  return j;
}

[[noreturn]] void bad_field(std::string_view field, std::string_view why) {
  throw Error(Errc::parse_error, "field '" + std::string(field) + "': " + std::string(why));
}

const Json& require(const Json& j, std::string_view key) {
  if (!j.is_object()) bad_field(key, "parent is not an object");
  const auto it = j.find(key);
  if (it == j.end()) bad_field(key, "missing");
  return *it;
}

double num(const Json& j, std::string_view key) {
  const Json& v = require(j, key);
  if (!v.is_number()) bad_field(key, "expected number");
  return v.get<double>();
}

int integer(const Json& j, std::string_view key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) bad_field(key, "expected integer");
  return v.get<int>();
}

std::string str(const Json& j, std::string_view key) {
  const Json& v = require(j, key);
  if (!v.is_string()) bad_field(key, "expected string");
  return v.get<std::string>();
}

template <typename Enum, typename Parse>
Enum enumerated(const Json& j, std::string_view key, Parse parse) {
  const auto s = str(j, key);
  const auto v = parse(s);
  if (!v) bad_field(key, "unknown value '" + s + "'");
  return *v;
}

std::vector<HourWindow> windows(const Json& j, std::string_view key) {
  const Json& v = require(j, key);
  if (!v.is_array()) bad_field(key, "expected array");
  std::vector<HourWindow> out;
  for (const auto& w : v) out.push_back(hour_window_from_json(w));
  return out;
}

geo::LatLon latlon(const Json& j, std::string_view key) {
  const Json& v = require(j, key);
  return {num(v, "lat"), num(v, "lon")};
}

}  // namespace

Json to_json(const HourWindow& w) { return Json::array({w.start, w.end}); }

HourWindow hour_window_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(Errc::parse_error, "hour window must be [start, end]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const LifestyleProfile& l) {
  Json j;
  j["commute_mode"] = to_string(l.commute_mode);
  j["daily_mobility_km"] = l.daily_mobility_km;
  j["exercise_freq_per_week"] = l.exercise_freq_per_week;
  j["exercise_hours"] = windows_json(l.exercise_hours);
  j["wake_hour"] = l.wake_hour;
  j["sleep_hour"] = l.sleep_hour;
  j["screen_time_windows"] = windows_json(l.screen_time_windows);
  j["commute_windows"] = windows_json(l.commute_windows);
  j["shift_type"] = to_string(l.shift_type);
  j["environment"] = to_string(l.environment);
  j["indoor_fraction"] = l.indoor_fraction;
  return j;
}

LifestyleProfile lifestyle_from_json(const Json& j) {
  LifestyleProfile l;
  l.commute_mode = enumerated<CommuteMode>(j, "commute_mode", parse_commute_mode);
  l.daily_mobility_km = num(j, "daily_mobility_km");
  l.exercise_freq_per_week = integer(j, "exercise_freq_per_week");
  l.exercise_hours = windows(j, "exercise_hours");
  l.wake_hour = num(j, "wake_hour");
  l.sleep_hour = num(j, "sleep_hour");
  l.screen_time_windows = windows(j, "screen_time_windows");
  l.commute_windows = windows(j, "commute_windows");
  l.shift_type = enumerated<ShiftType>(j, "shift_type", parse_shift_type);
  l.environment = enumerated<Environment>(j, "environment", parse_environment);
  l.indoor_fraction = num(j, "indoor_fraction");
  return l;
}

Json to_json(const LightCurve& c) {
  Json j;
  j["peak_lux"] = c.peak_lux;
  j["sunrise_hour"] = c.sunrise_hour;
  j["sunset_hour"] = c.sunset_hour;
  j["indoor_clamp_lux"] = c.indoor_clamp_lux;
  j["artificial_lux"] = c.artificial_lux;
  j["screen_lux"] = c.screen_lux;
  j["night_floor_lux"] = c.night_floor_lux;
  j["indoor_fraction"] = c.indoor_fraction;
  return j;
}

Json to_json(const SensorProfile& s) {
  Json j;
  Json var;
  for (auto level : kActivityLevels) var[std::string(to_string(level))] = s.variance(level);
  j["accel_variance_by_activity"] = var;
  j["accel_drift_rate"] = s.accel_drift_rate;
  j["daily_step_target"] = s.daily_step_target;
  j["walking_cadence_hz"] = s.walking_cadence_hz;
  j["light_curve"] = to_json(s.light_curve);
  j["mag_field_ut"] = s.mag_field_ut;
  j["max_speed_mps"] = s.max_speed_mps;
  j["home"] = latlon_json(s.home);
  j["work"] = latlon_json(s.work);
  j["timezone"] = s.timezone;
  j["active_hour_weights"] = s.active_hour_weights;
  j["wake_hour"] = s.wake_hour;
  j["sleep_hour"] = s.sleep_hour;
  j["exercise_hours"] = windows_json(s.exercise_hours);
  j["screen_time_windows"] = windows_json(s.screen_time_windows);
  j["commute_windows"] = windows_json(s.commute_windows);
  j["commute_mode"] = to_string(s.commute_mode);
  j["gps_accuracy_m"] = s.gps_accuracy_m;
  return j;
}

SensorProfile sensor_profile_from_json(const Json& j) {
  SensorProfile s;
  const Json& var = require(j, "accel_variance_by_activity");
  if (!var.is_object()) bad_field("accel_variance_by_activity", "expected object");
  for (const auto& [key, value] : var.items()) {
    const auto level = parse_activity_level(key);
    if (!level) bad_field("accel_variance_by_activity", "unknown activity level '" + key + "'");
    if (!value.is_number()) bad_field("accel_variance_by_activity", "expected number");
    s.accel_variance_by_activity[*level] = value.get<double>();
  }
  s.accel_drift_rate = num(j, "accel_drift_rate");
  s.daily_step_target = integer(j, "daily_step_target");
  s.walking_cadence_hz = num(j, "walking_cadence_hz");
  const Json& lc = require(j, "light_curve");
  s.light_curve.peak_lux = num(lc, "peak_lux");
  s.light_curve.sunrise_hour = num(lc, "sunrise_hour");
  s.light_curve.sunset_hour = num(lc, "sunset_hour");
  s.light_curve.indoor_clamp_lux = num(lc, "indoor_clamp_lux");
  s.light_curve.artificial_lux = num(lc, "artificial_lux");
  s.light_curve.screen_lux = num(lc, "screen_lux");
  s.light_curve.night_floor_lux = num(lc, "night_floor_lux");
  s.light_curve.indoor_fraction = num(lc, "indoor_fraction");
  s.mag_field_ut = num(j, "mag_field_ut");
  s.max_speed_mps = num(j, "max_speed_mps");
  s.home = latlon(j, "home");
  s.work = latlon(j, "work");
  s.timezone = str(j, "timezone");
  const Json& w = require(j, "active_hour_weights");
  if (!w.is_array() || w.size() != 24) bad_field("active_hour_weights", "expected 24 numbers");
  for (std::size_t h = 0; h < 24; ++h) {
    if (!w[h].is_number()) bad_field("active_hour_weights", "expected 24 numbers");
    s.active_hour_weights[h] = w[h].get<double>();
  }
  s.wake_hour = num(j, "wake_hour");
  s.sleep_hour = num(j, "sleep_hour");
  s.exercise_hours = windows(j, "exercise_hours");
  s.screen_time_windows = windows(j, "screen_time_windows");
  s.commute_windows = windows(j, "commute_windows");
  s.commute_mode = enumerated<CommuteMode>(j, "commute_mode", parse_commute_mode);
  s.gps_accuracy_m = num(j, "gps_accuracy_m");
  return s;
}

Json to_json(const Persona& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["id"] = p.id;
  j["name"] = p.name;
  j["age"] = p.age;
  j["gender"] = p.gender;
  Json loc;
  loc["name"] = p.location.name;
  loc["lat"] = p.location.coords.lat;
  loc["lon"] = p.location.coords.lon;
  j["location"] = loc;
  j["occupation"] = p.occupation;
  j["income_bracket"] = to_string(p.income_bracket);
  j["lifestyle"] = to_json(p.lifestyle);
  j["sensor_profile"] = to_json(p.sensor_profile);
  j["summary"] = p.summary;
  j["portrait_ref"] = p.portrait_ref ? Json(*p.portrait_ref) : Json(nullptr);
  return j;
}

Persona persona_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "persona must be a JSON object");
  const auto schema = integer(j, "schema");
  if (schema != kSchemaVersion) {
    throw Error(Errc::parse_error, "unsupported persona schema " + std::to_string(schema));
  }
  Persona p;
  p.id = str(j, "id");
  p.name = str(j, "name");
  p.age = integer(j, "age");
  p.gender = str(j, "gender");
  const Json& loc = require(j, "location");
  p.location.name = str(loc, "name");
  p.location.coords = {num(loc, "lat"), num(loc, "lon")};
  p.occupation = str(j, "occupation");
  p.income_bracket = enumerated<IncomeBracket>(j, "income_bracket", parse_income_bracket);
  p.lifestyle = lifestyle_from_json(require(j, "lifestyle"));
  p.sensor_profile = sensor_profile_from_json(require(j, "sensor_profile"));
  p.summary = str(j, "summary");
  if (const auto it = j.find("portrait_ref"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad_field("portrait_ref", "expected string or null");
    p.portrait_ref = it->get<std::string>();
  }
  return p;
}

std::string serialize(const Persona& p) { return dump_pretty(to_json(p)); }

Persona parse_persona(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, "persona is not valid JSON");
  return persona_from_json(j);
}

Persona load_persona(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_persona(ss.str());
}

void save_persona(const Persona& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << serialize(p);
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

}  // namespace sandbox::persona
