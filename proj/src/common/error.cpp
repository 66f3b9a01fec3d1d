#include "sandbox/common/error.hpp"

namespace sandbox {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_request: return "invalid-request";
    case Errc::generation_failed: return "generation-failed";
    case Errc::invalid_lifestyle: return "invalid-lifestyle";
    case Errc::invalid_window: return "invalid-window";
    case Errc::invalid_rate: return "invalid-rate";
    case Errc::unsupported_channel: return "unsupported-channel";
    case Errc::speed_violates_profile: return "speed-violates-profile";
    case Errc::decode_error: return "decode-error";
    case Errc::bind_failure: return "bind-failure";
    case Errc::protocol_violation: return "protocol-violation";
    case Errc::window_too_short: return "window-too-short";
    case Errc::agent_unreachable: return "agent-unreachable";
    case Errc::io_error: return "io-error";
    case Errc::parse_error: return "parse-error";
    case Errc::app_mismatch: return "app-mismatch";
    case Errc::summarizer_unavailable: return "summarizer-unavailable";
    case Errc::coercion_failure: return "coercion-failure";
    case Errc::conflict: return "conflict";
    case Errc::not_found: return "not-found";
  }
  return "unknown";
}

}  // namespace sandbox
