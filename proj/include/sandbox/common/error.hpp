#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sandbox {

enum class Errc {
  invalid_request,
  generation_failed,
  invalid_lifestyle,
  invalid_window,
  invalid_rate,
  unsupported_channel,
  speed_violates_profile,
  decode_error,
  bind_failure,
  protocol_violation,
  window_too_short,
  agent_unreachable,
  io_error,
  parse_error,
  app_mismatch,
  summarizer_unavailable,
  coercion_failure,
  conflict,
  not_found,
};

std::string_view to_string(Errc code);

// Every failure surfaced by the library carries one of the codes above so the
// CLI and HTTP layers can map it to an exit code / status without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sandbox
