#pragma once

#include "sandbox/common/error.hpp"
#include "sandbox/common/json.hpp"
#include "sandbox/sensor/channel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sandbox::device {

inline constexpr int kProtocolVersion = 1;

enum class FrameType { hello, spoof, snapshot_req, snapshot, app_launch, ack, error };

std::string_view to_string(FrameType t);
std::optional<FrameType> parse_frame_type(std::string_view s);

// {"v":1,"type":...,"id":N,"payload":{...}} on one LF-terminated line.
struct ProtocolFrame {
  int v = kProtocolVersion;
  FrameType type = FrameType::hello;
  std::uint64_t id = 0;
  Json payload = Json::object();

  friend bool operator==(const ProtocolFrame&, const ProtocolFrame&) = default;
};

enum class DecodeErrorKind { truncated, unknown_type, bad_version, arity_mismatch, malformed };

std::string_view to_string(DecodeErrorKind k);

class DecodeError : public Error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& message)
      : Error(Errc::decode_error, std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  DecodeErrorKind kind() const noexcept { return kind_; }

 private:
  DecodeErrorKind kind_;
};

// Compact JSON plus '\n'. Throws Error(invalid_request) if the payload does not
// fit its type, so a frame that encodes also decodes.
std::string encode_frame(const ProtocolFrame& f);

// Accepts exactly one record with its trailing '\n'. Never crashes; every
// rejection is a DecodeError.
ProtocolFrame decode_frame(std::string_view bytes);

// Checks the payload shape for the frame type; empty string when fine.
// `arity` is set when the only problem is a spoofed frame's value count.
std::string check_payload(FrameType type, const Json& payload, bool* arity = nullptr);

// Builders and accessors for the common payloads.
ProtocolFrame make_hello(std::uint64_t id, std::string_view role, const std::vector<std::string>& apps);
ProtocolFrame make_spoof(std::uint64_t id, const sensor::SensorFrame& frame);
ProtocolFrame make_snapshot_req(std::uint64_t id, std::string_view app_id, std::int64_t t);
ProtocolFrame make_app_launch(std::uint64_t id, std::string_view app_id, std::int64_t t, const Json& extras = {});
ProtocolFrame make_ack(std::uint64_t id, std::uint64_t ref);
ProtocolFrame make_error(std::uint64_t id, std::optional<std::uint64_t> ref, std::string_view code,
                         std::string_view message);

sensor::SensorFrame spoof_frame(const ProtocolFrame& f);

}  // namespace sandbox::device
