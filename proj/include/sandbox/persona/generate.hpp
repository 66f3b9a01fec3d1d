#pragma once

#include "sandbox/common/error.hpp"
#include "sandbox/common/json.hpp"
#include "sandbox/common/llm_client.hpp"
#include "sandbox/persona/persona.hpp"
#include "sandbox/persona/validate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sandbox::persona {

enum class GeneratorKind { template_based, llm };

struct PersonaHints {
  std::optional<std::string> occupation;
  std::optional<int> age;
  std::optional<std::string> location;  // city name from the bundled city table
  std::optional<std::string> name;
  std::optional<std::string> gender;
  std::optional<std::string> fitness;   // low | moderate | moderate-high | high
  std::optional<std::string> shift;     // day | night | rotating
  std::optional<std::string> commute;   // walk | bike | transit | car | none
  std::optional<std::string> income;

  friend bool operator==(const PersonaHints&, const PersonaHints&) = default;
};

struct PersonaRequest {
  std::uint64_t seed = 0;
  PersonaHints hints;
  GeneratorKind generator = GeneratorKind::template_based;
};

inline constexpr int kMaxLlmAttempts = 3;

// Raised when a persona could not be made to pass validation; carries the last
// report so callers can show the violations.
class PersonaRejected : public Error {
 public:
  PersonaRejected(Errc code, const std::string& message, ValidationReport report)
      : Error(code, message), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Throws Error(invalid_request) for malformed hints ("age": "old", unknown keys).
PersonaHints parse_hints(const Json& j);
Json to_json(const PersonaHints& h);

PersonaRequest parse_request(const Json& j);

struct City {
  std::string name;
  geo::LatLon coords;
  std::string timezone;
  Environment environment;
};

const std::vector<City>& city_table();
const City* find_city(std::string_view name);

// Template generator: deterministic in the request. The llm generator needs a
// client; it is retried up to kMaxLlmAttempts times with the violations fed back.
Persona generate_persona(const PersonaRequest& request, LlmClient* llm = nullptr);

// The structured prompt sent to the language model.
LlmRequest build_generation_prompt(const PersonaRequest& request, const std::vector<Violation>& previous = {});

// Coerces a model reply into a Persona (deriving the sensor block when absent).
// Throws Error(coercion_failure) on anything unusable.
Persona coerce_llm_persona(const std::string& reply, const PersonaRequest& request);

}  // namespace sandbox::persona
