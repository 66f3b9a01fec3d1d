#include "sandbox/persona/generate.hpp"

#include "sandbox/common/rng.hpp"
#include "sandbox/persona/derive.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace sandbox::persona {
namespace {

struct Schedule {
  double wake;
  double sleep;
  std::vector<HourWindow> exercise;
  std::vector<HourWindow> screen;
  double outbound_start;
  double return_start;
};

struct Archetype {
  std::string key;
  std::vector<std::string> keywords;
  std::string name;
  std::string gender;
  int age;
  std::string occupation;
  std::string city;
  IncomeBracket income;
  CommuteMode commute;
  double mobility_km;
  int exercise_freq;
  ShiftType shift;
  double indoor_fraction;
  Schedule schedule;
  std::string habits;
};

const std::vector<Archetype>& archetypes() {
  static const std::vector<Archetype> table{
      {"fitness_organizer",
       {"community organizer", "organizer", "gardener", "runner", "fitness", "trainer", "coach"},
       "Lila Rodriguez", "female", 27, "community organizer", "Los Angeles", IncomeBracket::lower_middle,
       CommuteMode::bike, 9.0, 5, ShiftType::day, 0.55,
       {5.5, 22.5, {{6.0, 7.0}, {19.0, 20.0}}, {{20.5, 22.0}}, 8.0, 17.5},
       "Tracks early-morning runs, bikes to work, tends an urban garden and practices yoga in the evening."},
      {"sedentary_developer",
       {"software developer", "developer", "programmer", "software engineer", "engineer", "designer"},
       "Carlos Ramirez", "male", 25, "software developer", "Austin", IncomeBracket::upper_middle,
       CommuteMode::car, 12.0, 1, ShiftType::day, 0.92,
       {9.0, 1.0, {}, {{19.0, 1.0}}, 9.5, 18.0},
       "High screen time and low physical activity; most phone use happens late in the evening."},
      {"day_nurse",
       {"nurse", "doctor", "physician", "caregiver", "pharmacist"},
       "Linda Johnson", "female", 45, "nurse", "Columbus", IncomeBracket::middle,
       CommuteMode::car, 16.0, 3, ShiftType::day, 0.8,
       {5.0, 21.5, {{6.0, 7.0}}, {{12.0, 12.75}}, 7.0, 19.5},
       "Moderate fitness routine with a brisk morning walk before a day shift; uses the phone during the day."},
      {"night_worker",
       {"security", "night", "warehouse", "janitor", "dispatcher"},
       "Marcus Lee", "male", 38, "security guard", "Chicago", IncomeBracket::lower_middle,
       CommuteMode::transit, 14.0, 2, ShiftType::night, 0.85,
       {15.0, 8.0, {{16.0, 17.0}}, {{16.0, 17.0}, {3.0, 4.0}}, 21.0, 7.0},
       "Works overnight shifts, sleeps through the morning and trains in the late afternoon."},
      {"student",
       {"student", "undergraduate", "intern"},
       "Maya Chen", "female", 20, "student", "Boston", IncomeBracket::low,
       CommuteMode::walk, 5.0, 3, ShiftType::day, 0.75,
       {8.0, 1.0, {{17.0, 18.0}}, {{21.0, 1.0}}, 9.0, 16.0},
       "Walks between campus buildings, plays intramural sports and scrolls late at night."},
      {"bakery_owner",
       {"baker", "bakery", "delivery", "farmer"},
       "Tom Becker", "male", 52, "bakery owner", "Burlington", IncomeBracket::middle,
       CommuteMode::car, 40.0, 2, ShiftType::day, 0.75,
       {4.25, 20.5, {{15.0, 16.0}}, {{19.0, 20.0}}, 4.5, 14.0},
       "Starts before dawn for early deliveries and goes for an afternoon walk after closing."},
      {"commuter",
       {"traveler", "sales", "consultant", "manager", "analyst"},
       "Sofia Rossi", "female", 34, "sales consultant", "Toronto", IncomeBracket::upper_middle,
       CommuteMode::transit, 18.0, 2, ShiftType::day, 0.8,
       {6.5, 23.5, {{7.0, 8.0}}, {{21.0, 23.0}}, 8.5, 17.5},
       "Rides transit across the city daily and often checks travel and shopping apps in the evening."},
      {"retiree",
       {"retiree", "retired", "pensioner"},
       "Giuseppe Romano", "male", 70, "retiree", "Rome", IncomeBracket::middle,
       CommuteMode::none, 3.0, 4, ShiftType::day, 0.7,
       {6.5, 22.0, {{9.0, 10.0}}, {{20.0, 21.0}}, 10.0, 12.0},
       "Takes a long morning walk through the neighbourhood and reads the news on a tablet after dinner."},
  };
  return table;
}

const Archetype& archetype(std::string_view key) {
  for (const auto& a : archetypes()) {
    if (a.key == key) return a;
  }
  return archetypes().front();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string slug(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "persona" : out;
}

int fitness_to_freq(std::string_view fitness) {
  if (fitness == "low") return 1;
  if (fitness == "moderate") return 3;
  if (fitness == "moderate-high") return 5;
  if (fitness == "high") return 6;
  throw Error(Errc::invalid_request, "fitness hint must be low, moderate, moderate-high or high");
}

const Archetype* match_occupation(const std::string& occupation) {
  const std::string occ = lower(occupation);
  for (const auto& a : archetypes()) {
    for (const auto& k : a.keywords) {
      if (occ.find(k) != std::string::npos) return &a;
    }
  }
  return nullptr;
}

const Archetype& pick_archetype(const PersonaHints& h, Rng& rng) {
  if (h.occupation) {
    if (const Archetype* a = match_occupation(*h.occupation)) return *a;
  }
  if (h.fitness) {
    const int f = fitness_to_freq(*h.fitness);
    if (f >= 5) return archetype("fitness_organizer");
    if (f <= 1) return archetype("sedentary_developer");
    return archetype("day_nurse");
  }
  if (h.shift && *h.shift == "night") return archetype("night_worker");
  const auto& all = archetypes();
  return all[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(all.size()) - 1))];
}

double ceil_quarter(double hours) { return std::ceil(hours * 4.0 - 1e-9) / 4.0; }

double wrap_hour(double h) {
  double r = std::fmod(h, 24.0);
  return r < 0 ? r + 24.0 : r;
}

std::vector<HourWindow> commute_windows(CommuteMode mode, double mobility_km, double outbound, double back) {
  if (mode == CommuteMode::none || mobility_km <= 0.0) return {};
  const double one_way_m = mobility_km * 500.0;
  const double hours = std::max(0.25, ceil_quarter(one_way_m / typical_mode_speed(mode) / 3600.0 * 1.2));
  return {{outbound, wrap_hour(outbound + hours)}, {back, wrap_hour(back + hours)}};
}

std::string describe(const Persona& p, const Archetype& a) {
  std::ostringstream ss;
  ss << p.name << ", " << p.age << ", " << p.occupation << " in " << p.location.name << ". " << a.habits;
  return ss.str();
}

Persona build_template(const PersonaRequest& req) {
  const PersonaHints& h = req.hints;
  Rng rng(derive_seed(req.seed, fnv1a64("persona_template")));
  const Archetype& base = pick_archetype(h, rng);

  Schedule schedule = base.schedule;
  ShiftType shift = base.shift;
  if (h.shift) {
    const auto parsed = parse_shift_type(*h.shift);
    if (!parsed) throw Error(Errc::invalid_request, "shift hint must be day, night or rotating");
    shift = *parsed;
    if (shift == ShiftType::night && base.shift != ShiftType::night) {
      schedule = archetype("night_worker").schedule;
    } else if (shift == ShiftType::day && base.shift == ShiftType::night) {
      schedule = archetype("day_nurse").schedule;
    }
  }

  Persona p;
  p.name = h.name.value_or(base.name);
  p.gender = h.gender.value_or(base.gender);
  p.age = h.age.value_or(base.age);
  p.occupation = h.occupation.value_or(base.occupation);
  p.income_bracket = base.income;
  if (h.income) {
    const auto parsed = parse_income_bracket(*h.income);
    if (!parsed) throw Error(Errc::invalid_request, "unknown income bracket '" + *h.income + "'");
    p.income_bracket = *parsed;
  }
  const City* city = find_city(h.location.value_or(base.city));
  if (city == nullptr) throw Error(Errc::invalid_request, "unknown location '" + *h.location + "'");
  p.location = {city->name, city->coords};

  LifestyleProfile& l = p.lifestyle;
  l.commute_mode = base.commute;
  if (h.commute) {
    const auto parsed = parse_commute_mode(*h.commute);
    if (!parsed) throw Error(Errc::invalid_request, "unknown commute mode '" + *h.commute + "'");
    l.commute_mode = *parsed;
  }
  // Seeded variation: mobility within +-10 %, wake time within +-15 min.
  const double mobility_scale = rng.uniform(0.9, 1.1);
  const double wake_shift = 0.25 * static_cast<double>(rng.uniform_int(-1, 1));
  l.daily_mobility_km = std::round(base.mobility_km * mobility_scale * 10.0) / 10.0;
  if (l.commute_mode == CommuteMode::none) l.daily_mobility_km = std::min(l.daily_mobility_km, 5.0);
  l.exercise_freq_per_week = h.fitness ? fitness_to_freq(*h.fitness) : base.exercise_freq;
  l.exercise_hours = schedule.exercise;
  if (l.exercise_freq_per_week == 0) l.exercise_hours.clear();
  if (l.exercise_freq_per_week >= 3 && l.exercise_hours.empty()) {
    l.exercise_hours = {shift == ShiftType::night ? HourWindow{16.0, 17.0} : HourWindow{18.0, 19.0}};
  }
  l.wake_hour = wrap_hour(schedule.wake + wake_shift);
  l.sleep_hour = schedule.sleep;
  l.screen_time_windows = schedule.screen;
  l.commute_windows = commute_windows(l.commute_mode, l.daily_mobility_km, schedule.outbound_start,
                                      schedule.return_start);
  l.shift_type = shift;
  l.environment = city->environment;
  l.indoor_fraction = base.indoor_fraction;

  p.sensor_profile = derive_sensor_profile(l, Demographics{p.age, city->coords, city->timezone}, req.seed);
  p.id = slug(p.name) + "-" + std::to_string(req.seed);
  p.summary = describe(p, base);
  p.portrait_ref = "portrait://" + p.id;
  return p;
}

}  // namespace

const std::vector<City>& city_table() {
  static const std::vector<City> table{
      {"Los Angeles", {34.0522, -118.2437}, "America/Los_Angeles", Environment::urban},
      {"Austin", {30.2672, -97.7431}, "America/Chicago", Environment::urban},
      {"Columbus", {39.9612, -82.9988}, "America/New_York", Environment::urban},
      {"Chicago", {41.8781, -87.6298}, "America/Chicago", Environment::urban},
      {"Boston", {42.3601, -71.0589}, "America/New_York", Environment::urban},
      {"New York", {40.7128, -74.0060}, "America/New_York", Environment::urban},
      {"Burlington", {44.4759, -73.2121}, "America/New_York", Environment::rural},
      {"Baltimore", {39.2904, -76.6122}, "America/New_York", Environment::urban},
      {"Toronto", {43.6532, -79.3832}, "America/Toronto", Environment::urban},
      {"Vancouver", {49.2827, -123.1207}, "America/Vancouver", Environment::urban},
      {"Rome", {41.8902, 12.4922}, "Europe/Rome", Environment::urban},
      {"Milan", {45.4642, 9.1900}, "Europe/Rome", Environment::urban},
      {"London", {51.5074, -0.1278}, "Europe/London", Environment::urban},
      {"Tokyo", {35.6762, 139.6503}, "Asia/Tokyo", Environment::urban},
  };
  return table;
}

const City* find_city(std::string_view name) {
  const std::string needle = lower(std::string(name));
  for (const auto& c : city_table()) {
    if (lower(c.name) == needle) return &c;
  }
  return nullptr;
}

PersonaHints parse_hints(const Json& j) {
  PersonaHints h;
  if (j.is_null()) return h;
  if (!j.is_object()) throw Error(Errc::invalid_request, "hints must be a JSON object");
  auto text = [](const Json& v, std::string_view key) {
    if (!v.is_string()) throw Error(Errc::invalid_request, "hint '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "occupation") {
      h.occupation = text(value, key);
    } else if (key == "age") {
      if (!value.is_number_integer()) throw Error(Errc::invalid_request, "hint 'age' must be an integer");
      const auto age = value.get<std::int64_t>();
      if (age < -1000000 || age > 1000000) throw Error(Errc::invalid_request, "hint 'age' out of range");
      h.age = static_cast<int>(age);
    } else if (key == "location") {
      h.location = text(value, key);
    } else if (key == "name") {
      h.name = text(value, key);
    } else if (key == "gender") {
      h.gender = text(value, key);
    } else if (key == "fitness") {
      h.fitness = text(value, key);
      fitness_to_freq(*h.fitness);
    } else if (key == "shift") {
      h.shift = text(value, key);
    } else if (key == "commute") {
      h.commute = text(value, key);
    } else if (key == "income") {
      h.income = text(value, key);
    } else {
      throw Error(Errc::invalid_request, "unknown hint '" + key + "'");
    }
  }
  return h;
}

Json to_json(const PersonaHints& h) {
  Json j = Json::object();
  if (h.occupation) j["occupation"] = *h.occupation;
  if (h.age) j["age"] = *h.age;
  if (h.location) j["location"] = *h.location;
  if (h.name) j["name"] = *h.name;
  if (h.gender) j["gender"] = *h.gender;
  if (h.fitness) j["fitness"] = *h.fitness;
  if (h.shift) j["shift"] = *h.shift;
  if (h.commute) j["commute"] = *h.commute;
  if (h.income) j["income"] = *h.income;
  return j;
}

PersonaRequest parse_request(const Json& j) {
  if (!j.is_object()) throw Error(Errc::invalid_request, "persona request must be a JSON object");
  PersonaRequest r;
  const auto seed = j.find("seed");
  if (seed == j.end() || !seed->is_number_unsigned()) {
    throw Error(Errc::invalid_request, "persona request needs a non-negative integer 'seed'");
  }
  r.seed = seed->get<std::uint64_t>();
  if (const auto it = j.find("hints"); it != j.end()) r.hints = parse_hints(*it);
  if (const auto it = j.find("generator"); it != j.end()) {
    if (*it == "template") {
      r.generator = GeneratorKind::template_based;
    } else if (*it == "llm") {
      r.generator = GeneratorKind::llm;
    } else {
      throw Error(Errc::invalid_request, "generator must be 'template' or 'llm'");
    }
  }
  return r;
}

LlmRequest build_generation_prompt(const PersonaRequest& request, const std::vector<Violation>& previous) {
  LlmRequest r;
  r.system =
      "You generate synthetic smartphone-user personas for a privacy research sandbox. "
      "Reply with a single JSON object and nothing else.";
  std::ostringstream u;
  u << "Create one realistic persona. Cover these four categories:\n"
       "1. Demographics: age, gender, location (city), occupation, income bracket.\n"
       "2. Lifestyle patterns: commuting habits, daily mobility range, exercise frequency, typical app use times.\n"
       "3. Sensor behavior parameters: statistical ranges for motion, light, magnetic field and temporal activity,\n"
       "   derived from the lifestyle.\n"
       "4. Environmental context: urban or rural lighting, indoor/outdoor time split.\n\n"
       "Return JSON with exactly these keys:\n"
       "{\"name\": str, \"age\": int, \"gender\": str, \"location\": str (one of: ";
  bool first = true;
  for (const auto& c : city_table()) {
    u << (first ? "" : ", ") << c.name;
    first = false;
  }
  u << "), \"occupation\": str, \"income_bracket\": \"low|lower_middle|middle|upper_middle|high\",\n"
       " \"summary\": str,\n"
       " \"lifestyle\": {\"commute_mode\": \"walk|bike|transit|car|none\", \"daily_mobility_km\": number,\n"
       "   \"exercise_freq_per_week\": int, \"exercise_hours\": [[start, end], ...], \"wake_hour\": number,\n"
       "   \"sleep_hour\": number, \"screen_time_windows\": [[start, end], ...],\n"
       "   \"commute_windows\": [[outbound_start, outbound_end], [return_start, return_end]],\n"
       "   \"shift_type\": \"day|night|rotating\", \"environment\": \"urban|rural\", \"indoor_fraction\": number}}\n"
       "Hours are local, 0-24. Keep the persona internally consistent: night-shift workers are not active in the "
       "morning, and commutes must be physically possible for the chosen mode.\n";
  const Json hints = to_json(request.hints);
  if (!hints.empty()) u << "Constraints from the operator: " << dump_line(hints) << "\n";
  if (!previous.empty()) {
    u << "Your previous answer failed these checks; fix them:\n";
    for (const auto& v : previous) u << "- " << v.rule_id << ": " << v.message << "\n";
  }
  r.user = u.str();
  return r;
}

Persona coerce_llm_persona(const std::string& reply, const PersonaRequest& request) {
  const Json j = Json::parse(outermost_object(reply), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::coercion_failure, "model reply is not a JSON object");
  try {
    Persona p;
    p.name = j.at("name").get<std::string>();
    p.age = j.at("age").get<int>();
    p.gender = j.at("gender").get<std::string>();
    p.occupation = j.at("occupation").get<std::string>();
    const auto income = parse_income_bracket(j.at("income_bracket").get<std::string>());
    if (!income) throw Error(Errc::coercion_failure, "unknown income bracket");
    p.income_bracket = *income;
    const City* city = find_city(j.at("location").get<std::string>());
    if (city == nullptr) throw Error(Errc::coercion_failure, "location not in the city table");
    p.location = {city->name, city->coords};
    p.summary = j.value("summary", std::string{});
    p.lifestyle = lifestyle_from_json(j.at("lifestyle"));
    p.sensor_profile =
        derive_sensor_profile(p.lifestyle, Demographics{p.age, city->coords, city->timezone}, request.seed);
    p.id = slug(p.name) + "-" + std::to_string(request.seed);
    p.portrait_ref = "portrait://" + p.id;
    return p;
  } catch (const Error& e) {
    if (e.code() == Errc::coercion_failure) throw;
    throw Error(Errc::coercion_failure, e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::coercion_failure, e.what());
  }
}

Persona generate_persona(const PersonaRequest& request, LlmClient* llm) {
  if (request.generator == GeneratorKind::template_based) {
    Persona p = build_template(request);
    ValidationReport report = validate_persona(p);
    if (!report.ok) {
      throw PersonaRejected(Errc::invalid_request, "hints produce an implausible persona", std::move(report));
    }
    return p;
  }

  if (llm == nullptr) throw Error(Errc::generation_failed, "llm generator selected but no client configured");
  std::vector<Violation> feedback;
  ValidationReport last;
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < kMaxLlmAttempts; ++attempt) {
    std::string reply;
    try {
      reply = llm->complete(build_generation_prompt(request, feedback));
    } catch (const Error& e) {
      throw Error(Errc::generation_failed, e.what());
    }
    try {
      Persona p = coerce_llm_persona(reply, request);
      last = validate_persona(p);
      if (last.ok) return p;
      feedback = last.violations;
      last_error = "persona failed validation";
    } catch (const Error& e) {
      last_error = e.what();
      feedback = {Violation{"schema", Severity::error, e.what()}};
    }
  }
  throw PersonaRejected(Errc::generation_failed,
                        std::to_string(kMaxLlmAttempts) + " attempts produced no valid persona (" + last_error + ")",
                        std::move(last));
}

}  // namespace sandbox::persona
