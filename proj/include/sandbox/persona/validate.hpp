#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/persona/persona.hpp"

#include <string>
#include <vector>

namespace sandbox::persona {

inline constexpr const char* kRulesetVersion = "persona-rules/1";

// Rule ids are stable strings; reports are compared on them.
namespace rule {
inline constexpr const char* kNightShiftMorning = "R1";
inline constexpr const char* kGpsSpeed = "R2";
inline constexpr const char* kSleepSchedule = "R3";
inline constexpr const char* kStepTarget = "R4";
inline constexpr const char* kFieldRange = "R5";
inline constexpr const char* kProfileConsistency = "R6";
}  // namespace rule

// Hours 05:00-10:00 of a night-shift persona must stay below this fraction of
// the persona's busiest hour.
inline constexpr double kNightShiftMorningThreshold = 0.5;

enum class Severity { error, warning };

struct Violation {
  std::string rule_id;
  Severity severity = Severity::error;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool has_rule(std::string_view rule_id) const;
};

ValidationReport validate_persona(const Persona& p);

Json to_json(const ValidationReport& r);

}  // namespace sandbox::persona
