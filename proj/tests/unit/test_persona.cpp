#include "sandbox/persona/derive.hpp"
#include "sandbox/persona/generate.hpp"
#include "sandbox/persona/persona.hpp"
#include "sandbox/persona/validate.hpp"
#include "sandbox/common/rng.hpp"

#include "oracles/rule_oracle.hpp"
#include "support/rule_fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

using namespace sandbox;
using namespace sandbox::persona;

namespace {

using fixtures::make;

std::set<std::string> error_rules(const ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) {
    if (v.severity == Severity::error) out.insert(v.rule_id);
  }
  return out;
}

std::set<std::string> warning_rules(const ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) {
    if (v.severity == Severity::warning) out.insert(v.rule_id);
  }
  return out;
}

std::size_t argmax_hour(const SensorProfile& s) {
  return static_cast<std::size_t>(std::max_element(s.active_hour_weights.begin(), s.active_hour_weights.end()) -
                                  s.active_hour_weights.begin());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("seed 0 template persona is valid and byte-stable") {
  const Persona a = make(0);
  const Persona b = make(0);
  CHECK(serialize(a) == serialize(b));
  const auto report = validate_persona(a);
  CHECK(report.ok);
  CHECK(report.violations.empty());
  CHECK(serialize(parse_persona(serialize(a))) == serialize(a));
  CHECK(parse_persona(serialize(a)) == a);
}

TEST_CASE("seed 0 persona matches the checked-in golden file") {
  const std::string golden = read_file(std::string(SANDBOX_SOURCE_DIR) + "/tests/golden/persona_seed0.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(serialize(make(0)) == golden);
}

TEST_CASE("community organizer hint gives the early-rising fitness persona") {
  const Persona p = make(1, R"({"occupation":"community organizer","age":27,"fitness":"moderate-high"})");
  CHECK(p.name == "Lila Rodriguez");
  CHECK(p.age == 27);
  CHECK(p.lifestyle.environment == Environment::urban);
  CHECK(p.lifestyle.exercise_freq_per_week >= 5);
  CHECK(p.sensor_profile.daily_step_target >= 9000);
  CHECK(p.sensor_profile.daily_step_target <= 14000);
  CHECK(p.lifestyle.wake_hour < 7.0);
  // Morning run: the 06:00 hour is among the busiest.
  CHECK(p.sensor_profile.active_hour_weights[6] == doctest::Approx(1.0));
  // Active commute raises motion variance during commute hours above idle.
  CHECK(p.sensor_profile.variance(ActivityLevel::moderate) > p.sensor_profile.variance(ActivityLevel::light));
  CHECK(p.sensor_profile.accel_drift_rate > default_mapping().drift_base);
  CHECK(validate_persona(p).ok);
}

TEST_CASE("software developer in Austin is sedentary with late evening activity") {
  const Persona carlos = make(2, R"({"occupation":"software developer","age":25,"location":"Austin"})");
  const Persona lila = make(2, R"({"occupation":"community organizer","age":27,"fitness":"moderate-high"})");
  CHECK(carlos.age == 25);
  CHECK(carlos.location.name == "Austin");
  CHECK(carlos.sensor_profile.daily_step_target <= 5000);
  CHECK(carlos.sensor_profile.variance(ActivityLevel::light) < lila.sensor_profile.variance(ActivityLevel::light));
  const auto peak = argmax_hour(carlos.sensor_profile);
  CHECK((peak >= 18 || peak <= 1));
  CHECK(carlos.sensor_profile.light_curve.screen_lux > lila.sensor_profile.light_curve.screen_lux);
  CHECK(validate_persona(carlos).ok);
}

TEST_CASE("nurse persona has morning-weighted motion and light") {
  const Persona p = make(3, R"({"occupation":"nurse","age":45})");
  CHECK(p.age == 45);
  const auto peak = argmax_hour(p.sensor_profile);
  CHECK(peak >= 5);
  CHECK(peak <= 9);
  CHECK(p.lifestyle.wake_hour <= 6.0);
  CHECK(validate_persona(p).ok);
}

TEST_CASE("malformed hints are rejected") {
  CHECK_THROWS_AS(parse_hints(Json::parse(R"({"age":"old"})")), Error);
  CHECK_THROWS_AS(parse_hints(Json::parse(R"({"favourite_colour":"red"})")), Error);
  CHECK_THROWS_AS(parse_hints(Json::parse(R"({"fitness":"extreme"})")), Error);
  CHECK_THROWS_AS(parse_request(Json::parse(R"({"hints":{}})")), Error);
  CHECK_THROWS_AS(parse_request(Json::parse(R"({"seed":1,"generator":"oracle"})")), Error);
}

TEST_CASE("implausible hints surface the validation report") {
  try {
    (void)make(4, R"({"age":200})");
    FAIL("expected rejection");
  } catch (const PersonaRejected& e) {
    CHECK(e.code() == Errc::invalid_request);
    CHECK(e.report().has_rule(rule::kFieldRange));
  }
}

TEST_CASE("template generator personas always validate") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Persona p = make(seed);
    const auto report = validate_persona(p);
    INFO("seed " << seed << " " << dump_line(to_json(report)));
    CHECK(report.ok);
  }
}

// ---------------------------------------------------------------------------
// Rule fixtures: each one violates exactly one rule.

namespace {

using fixtures::night_worker;
using fixtures::sync_copies;

Persona fixture(const std::string& rule_id) { return fixtures::rule_fixture(rule_id); }

}  // namespace

TEST_CASE("night worker baseline is clean") {
  const Persona p = night_worker();
  CHECK(p.lifestyle.shift_type == ShiftType::night);
  CHECK(validate_persona(p).ok);
}

TEST_CASE("one-violation fixtures flag exactly their rule") {
  for (const std::string id : {"R1", "R2", "R3", "R4", "R5", "R6"}) {
    const Persona p = fixture(id);
    const auto report = validate_persona(p);
    INFO(id << " " << dump_line(to_json(report)));
    CHECK_FALSE(report.ok);
    CHECK(error_rules(report) == std::set<std::string>{id});
    CHECK(oracle::check_rules(p).errors == std::set<std::string>{id});
  }
}

TEST_CASE("walk commute 40 km in 20 minutes trips R2") {
  const auto report = validate_persona(fixture("R2"));
  CHECK(report.has_rule(rule::kGpsSpeed));
}

TEST_CASE("night shift with high 07:00 activity trips R1") {
  const auto report = validate_persona(fixture("R1"));
  CHECK(report.has_rule(rule::kNightShiftMorning));
}

TEST_CASE("validator agrees with the independent rule oracle on mutated personas") {
  Rng rng(2024);
  int disagreements = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    Persona p = make(static_cast<std::uint64_t>(trial % 50), trial % 7 == 0 ? R"({"shift":"night"})" : "{}");
    fixtures::mutate_persona(p, rng);
    const auto report = validate_persona(p);
    const auto expected = oracle::check_rules(p);
    if (error_rules(report) != expected.errors || warning_rules(report) != expected.warnings) {
      ++disagreements;
      INFO("trial " << trial << " " << dump_line(to_json(report)));
      CHECK(error_rules(report) == expected.errors);
    }
    CHECK(report.ok == expected.errors.empty());
  }
  CHECK(disagreements == 0);
}

// ---------------------------------------------------------------------------
// Mapping table

namespace {

LifestyleProfile base_lifestyle() {
  LifestyleProfile l;
  l.commute_mode = CommuteMode::transit;
  l.daily_mobility_km = 12;
  l.exercise_freq_per_week = 2;
  l.exercise_hours = {{18, 19}};
  l.wake_hour = 7;
  l.sleep_hour = 23;
  l.screen_time_windows = {{20, 22}};
  l.commute_windows = {{8, 8.75}, {17, 17.75}};
  return l;
}

}  // namespace

TEST_CASE("derive_sensor_profile is deterministic") {
  const Demographics d{30, {41.8781, -87.6298}, "America/Chicago"};
  CHECK(derive_sensor_profile(base_lifestyle(), d, 9) == derive_sensor_profile(base_lifestyle(), d, 9));
  CHECK_FALSE(derive_sensor_profile(base_lifestyle(), d, 9) == derive_sensor_profile(base_lifestyle(), d, 10));
}

TEST_CASE("step bands follow the mapping table") {
  const Demographics d{30, {41.8781, -87.6298}, "America/Chicago"};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto l = base_lifestyle();
    l.exercise_freq_per_week = 6;
    const auto active = derive_sensor_profile(l, d, seed).daily_step_target;
    CHECK(active >= 9000);
    CHECK(active <= 14000);
    l.exercise_freq_per_week = 0;
    const auto sedentary = derive_sensor_profile(l, d, seed).daily_step_target;
    CHECK(sedentary >= 2000);
    CHECK(sedentary <= 5000);
  }
}

TEST_CASE("more exercise never lowers the step target") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    auto l = base_lifestyle();
    l.daily_mobility_km = rng.uniform(0, 60);
    const Demographics d{static_cast<int>(rng.uniform_int(13, 100)), {rng.uniform(-60, 60), rng.uniform(-170, 170)},
                         "UTC"};
    const auto seed = rng.next();
    int previous = -1;
    for (int f = 0; f <= 21; ++f) {
      l.exercise_freq_per_week = f;
      const int target = derive_sensor_profile(l, d, seed).daily_step_target;
      REQUIRE(target >= previous);
      previous = target;
    }
  }
}

TEST_CASE("day to night shift moves the busiest hour by 12 +/- 2") {
  Rng rng(5);
  auto shift = [](double h) { return std::fmod(h + 12.0, 24.0); };
  for (int trial = 0; trial < 1000; ++trial) {
    LifestyleProfile day = base_lifestyle();
    day.wake_hour = 5.0 + 0.25 * static_cast<double>(rng.uniform_int(0, 12));
    day.sleep_hour = 21.0 + 0.25 * static_cast<double>(rng.uniform_int(0, 8));
    const double ex = 6.0 + static_cast<double>(rng.uniform_int(0, 12));
    day.exercise_hours = {{ex, ex + 1.0}};
    LifestyleProfile night = day;
    night.shift_type = ShiftType::night;
    night.wake_hour = shift(day.wake_hour);
    night.sleep_hour = shift(day.sleep_hour);
    for (auto* list : {&night.exercise_hours, &night.screen_time_windows, &night.commute_windows}) {
      for (auto& w : *list) w = {shift(w.start), shift(w.end)};
    }
    const Demographics d{35, {40.0, -80.0}, "UTC"};
    const auto a = static_cast<int>(argmax_hour(derive_sensor_profile(day, d, 1)));
    const auto b = static_cast<int>(argmax_hour(derive_sensor_profile(night, d, 1)));
    const int delta = ((b - a) % 24 + 24) % 24;
    REQUIRE(delta >= 10);
    REQUIRE(delta <= 14);
    const auto lc = derive_sensor_profile(night, d, 1).light_curve;
    CHECK(lc.sunrise_hour == doctest::Approx(18.0));
    CHECK(lc.sunset_hour == doctest::Approx(8.0));
  }
}

TEST_CASE("zero-activity lifestyle sits at the bottom band with flat waking weights") {
  LifestyleProfile l;
  l.commute_mode = CommuteMode::none;
  l.daily_mobility_km = 0;
  l.exercise_freq_per_week = 0;
  l.wake_hour = 7;
  l.sleep_hour = 23;
  const auto s = derive_sensor_profile(l, {40, {45.0, 9.0}, "Europe/Rome"}, 3);
  CHECK(s.daily_step_target >= 2000);
  CHECK(s.daily_step_target <= 2000 + 3000 * 0.15 + 10);
  for (int h = 7; h < 23; ++h) CHECK(s.active_hour_weights[static_cast<std::size_t>(h)] == doctest::Approx(1.0));
  CHECK(s.active_hour_weights[3] < 0.2);
  CHECK(s.work == s.home);
}

TEST_CASE("urban life raises indoor fraction") {
  auto l = base_lifestyle();
  l.indoor_fraction = 0.6;
  l.environment = Environment::urban;
  const Demographics d{30, {41.8781, -87.6298}, "America/Chicago"};
  const auto urban = derive_sensor_profile(l, d, 1);
  l.environment = Environment::rural;
  const auto rural = derive_sensor_profile(l, d, 1);
  CHECK(urban.light_curve.indoor_fraction > rural.light_curve.indoor_fraction);
}

TEST_CASE("invalid lifestyle is refused") {
  auto l = base_lifestyle();
  l.daily_mobility_km = 900;
  CHECK_THROWS_AS(derive_sensor_profile(l, {30, {0, 0}, "UTC"}, 1), Error);
  l = base_lifestyle();
  CHECK_THROWS_AS(derive_sensor_profile(l, {30, {0, 0}, "Nowhere/City"}, 1), Error);
  l.exercise_hours = {{5, 5}};
  CHECK_THROWS_AS(derive_sensor_profile(l, {30, {0, 0}, "UTC"}, 1), Error);
}

// ---------------------------------------------------------------------------
// LLM path with a scripted fake

namespace {

class ScriptedLlm : public LlmClient {
 public:
  explicit ScriptedLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const LlmRequest& request) override {
    prompts.push_back(request.user);
    if (calls_ >= replies_.size()) throw Error(Errc::generation_failed, "script exhausted");
    return replies_[calls_++];
  }
  std::vector<std::string> prompts;

 private:
  std::vector<std::string> replies_;
  std::size_t calls_ = 0;
};

class DownLlm : public LlmClient {
 public:
  std::string complete(const LlmRequest&) override { throw Error(Errc::generation_failed, "connection refused"); }
};

std::string llm_reply(int age, double wake) {
  Json j;
  j["name"] = "Ana Silva";
  j["age"] = age;
  j["gender"] = "female";
  j["occupation"] = "teacher";
  j["income_bracket"] = "middle";
  j["location"] = "Toronto";
  j["summary"] = "Teaches, cycles to school.";
  LifestyleProfile l;
  l.commute_mode = CommuteMode::bike;
  l.daily_mobility_km = 8;
  l.exercise_freq_per_week = 3;
  l.exercise_hours = {{17, 18}};
  l.wake_hour = wake;
  l.sleep_hour = 22.5;
  l.screen_time_windows = {{20, 21}};
  l.commute_windows = {{7.5, 8.0}, {16, 16.5}};
  j["lifestyle"] = to_json(l);
  return "```json\n" + dump_pretty(j) + "```";
}

PersonaRequest llm_request() {
  PersonaRequest r;
  r.seed = 8;
  r.generator = GeneratorKind::llm;
  r.hints.occupation = "teacher";
  return r;
}

}  // namespace

TEST_CASE("llm output is coerced and validated") {
  ScriptedLlm llm({llm_reply(41, 6.0)});
  const Persona p = generate_persona(llm_request(), &llm);
  CHECK(p.name == "Ana Silva");
  CHECK(p.location.name == "Toronto");
  CHECK(validate_persona(p).ok);
  REQUIRE(llm.prompts.size() == 1);
  for (const char* section : {"Demographics", "Lifestyle", "Sensor", "Environment"}) {
    CHECK(llm.prompts[0].find(section) != std::string::npos);
  }
}

TEST_CASE("llm retries feed violations back and stop after three attempts") {
  ScriptedLlm fixed({"not json", llm_reply(200, 6.0), llm_reply(41, 6.0)});
  CHECK(generate_persona(llm_request(), &fixed).age == 41);
  REQUIRE(fixed.prompts.size() == 3);
  CHECK(fixed.prompts[2].find("R5") != std::string::npos);

  ScriptedLlm hopeless({llm_reply(200, 6.0), llm_reply(200, 6.0), llm_reply(200, 6.0), llm_reply(41, 6.0)});
  try {
    (void)generate_persona(llm_request(), &hopeless);
    FAIL("expected generation failure");
  } catch (const PersonaRejected& e) {
    CHECK(e.code() == Errc::generation_failed);
    CHECK(e.report().has_rule(rule::kFieldRange));
  }
  CHECK(hopeless.prompts.size() == static_cast<std::size_t>(kMaxLlmAttempts));
}

TEST_CASE("unreachable llm is a generation failure") {
  DownLlm down;
  try {
    (void)generate_persona(llm_request(), &down);
    FAIL("expected generation failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::generation_failed);
  }
  try {
    (void)generate_persona(llm_request(), nullptr);
    FAIL("expected generation failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::generation_failed);
  }
}
