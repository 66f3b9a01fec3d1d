#include "sandbox/device/protocol.hpp"

#include "sandbox/device/ui.hpp"

#include <array>
#include <initializer_list>

namespace sandbox::device {
namespace {

constexpr std::array<std::string_view, 7> kTypeNames{"hello", "spoof", "snapshot_req", "snapshot",
                                                     "app_launch", "ack", "error"};

bool only_keys(const Json& j, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (auto k : keys) known |= key == k;
    if (!known) return false;
  }
  return true;
}

bool has_string(const Json& j, const char* key) { return j.contains(key) && j.at(key).is_string(); }
bool has_uint(const Json& j, const char* key) { return j.contains(key) && j.at(key).is_number_unsigned(); }
bool has_time(const Json& j, const char* key) {
  if (!j.contains(key)) return false;
  const Json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX);
  return v.is_number_integer() && v.get<std::int64_t>() >= 0;
}

}  // namespace

std::string_view to_string(FrameType t) { return kTypeNames.at(static_cast<std::size_t>(t)); }

std::optional<FrameType> parse_frame_type(std::string_view s) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == s) return static_cast<FrameType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::truncated: return "truncated";
    case DecodeErrorKind::unknown_type: return "unknown-type";
    case DecodeErrorKind::bad_version: return "bad-version";
    case DecodeErrorKind::arity_mismatch: return "arity-mismatch";
    case DecodeErrorKind::malformed: return "malformed";
  }
  return "malformed";
}

std::string check_payload(FrameType type, const Json& p, bool* arity) {
  if (arity) *arity = false;
  if (!p.is_object()) return "payload must be an object";
  switch (type) {
    case FrameType::hello: {
      if (!only_keys(p, {"role", "apps"}) || !has_string(p, "role")) return "hello needs role and apps";
      if (!p.contains("apps") || !p.at("apps").is_array()) return "hello needs an apps array";
      for (const auto& a : p.at("apps")) {
        if (!a.is_string()) return "app ids must be strings";
      }
      return {};
    }
    case FrameType::spoof: {
      if (!only_keys(p, {"t", "channel", "values"})) return "unexpected field in sensor frame";
      sensor::SensorFrame f;
      try {
        f = sensor::frame_from_json(p);
      } catch (const Error& e) {
        return e.what();
      }
      std::string why = sensor::check_frame(f);
      if (!why.empty() && arity) {
        const auto& ci = sensor::info(f.channel);
        *arity = ci.textual ? (!f.values.empty() || f.text.empty()) : (!f.text.empty() || f.values.size() != ci.arity);
      }
      return why;
    }
    case FrameType::snapshot_req:
      if (!only_keys(p, {"app_id", "t"}) || !has_string(p, "app_id") || !has_time(p, "t")) {
        return "snapshot_req needs app_id and t";
      }
      return {};
    case FrameType::snapshot: {
      if (!only_keys(p, {"ref", "snapshot"}) || !has_uint(p, "ref") || !p.contains("snapshot")) {
        return "snapshot needs ref and snapshot";
      }
      try {
        (void)snapshot_from_json(p.at("snapshot"));
      } catch (const Error& e) {
        return e.what();
      }
      return {};
    }
    case FrameType::app_launch:
      if (!only_keys(p, {"app_id", "t", "extras"}) || !has_string(p, "app_id") || !has_time(p, "t")) {
        return "app_launch needs app_id and t";
      }
      if (!p.contains("extras") || !p.at("extras").is_object()) return "app_launch needs an extras object";
      return {};
    case FrameType::ack:
      if (!only_keys(p, {"ref"}) || !has_uint(p, "ref")) return "ack needs ref";
      return {};
    case FrameType::error:
      if (!only_keys(p, {"ref", "code", "message"}) || !has_string(p, "code") || !has_string(p, "message")) {
        return "error needs ref, code and message";
      }
      if (!p.contains("ref") || !(p.at("ref").is_null() || p.at("ref").is_number_unsigned())) {
        return "error ref must be an id or null";
      }
      return {};
  }
  return "unknown frame type";
}

std::string encode_frame(const ProtocolFrame& f) {
  if (f.v != kProtocolVersion) throw Error(Errc::invalid_request, "cannot encode protocol version " + std::to_string(f.v));
  if (const auto why = check_payload(f.type, f.payload); !why.empty()) {
    throw Error(Errc::invalid_request, std::string(to_string(f.type)) + " payload: " + why);
  }
  Json j;
  j["v"] = f.v;
  j["type"] = to_string(f.type);
  j["id"] = f.id;
  j["payload"] = f.payload;
  std::string out = dump_line(j);
  out += '\n';
  return out;
}

ProtocolFrame decode_frame(std::string_view bytes) {
  using K = DecodeErrorKind;
  if (bytes.empty() || bytes.back() != '\n') throw DecodeError(K::truncated, "record is not newline terminated");
  const std::string_view body = bytes.substr(0, bytes.size() - 1);
  if (body.find('\n') != std::string_view::npos) throw DecodeError(K::malformed, "more than one record");

  Json j;
  try {
    j = Json::parse(body.begin(), body.end());
  } catch (const nlohmann::json::parse_error& e) {
    if (e.byte >= body.size()) throw DecodeError(K::truncated, "record ends mid-value");
    throw DecodeError(K::malformed, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(K::malformed, e.what());
  }
  if (!j.is_object()) throw DecodeError(K::malformed, "record must be an object");
  if (!only_keys(j, {"v", "type", "id", "payload"})) throw DecodeError(K::malformed, "unexpected top-level field");

  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) throw DecodeError(K::malformed, "missing integer 'v'");
  if (!v->is_number_unsigned() || v->get<std::uint64_t>() != kProtocolVersion) {
    throw DecodeError(K::bad_version, "unsupported protocol version " + v->dump());
  }
  const auto type = j.find("type");
  if (type == j.end() || !type->is_string()) throw DecodeError(K::malformed, "missing 'type'");
  const auto parsed = parse_frame_type(type->get<std::string>());
  if (!parsed) throw DecodeError(K::unknown_type, "unknown frame type '" + type->get<std::string>() + "'");
  const auto id = j.find("id");
  if (id == j.end() || !id->is_number_unsigned()) throw DecodeError(K::malformed, "missing unsigned 'id'");
  const auto payload = j.find("payload");
  if (payload == j.end()) throw DecodeError(K::malformed, "missing 'payload'");

  bool arity = false;
  if (const auto why = check_payload(*parsed, *payload, &arity); !why.empty()) {
    throw DecodeError(arity ? K::arity_mismatch : K::malformed, why);
  }
  ProtocolFrame f;
  f.v = kProtocolVersion;
  f.type = *parsed;
  f.id = id->get<std::uint64_t>();
  f.payload = *payload;
  return f;
}

ProtocolFrame make_hello(std::uint64_t id, std::string_view role, const std::vector<std::string>& apps) {
  Json p;
  p["role"] = role;
  p["apps"] = apps;
  return {kProtocolVersion, FrameType::hello, id, p};
}

ProtocolFrame make_spoof(std::uint64_t id, const sensor::SensorFrame& frame) {
  return {kProtocolVersion, FrameType::spoof, id, sensor::to_json(frame)};
}

ProtocolFrame make_snapshot_req(std::uint64_t id, std::string_view app_id, std::int64_t t) {
  Json p;
  p["app_id"] = app_id;
  p["t"] = t;
  return {kProtocolVersion, FrameType::snapshot_req, id, p};
}

ProtocolFrame make_app_launch(std::uint64_t id, std::string_view app_id, std::int64_t t, const Json& extras) {
  Json p;
  p["app_id"] = app_id;
  p["t"] = t;
  p["extras"] = extras.is_object() ? extras : Json::object();
  return {kProtocolVersion, FrameType::app_launch, id, p};
}

ProtocolFrame make_ack(std::uint64_t id, std::uint64_t ref) {
  Json p;
  p["ref"] = ref;
  return {kProtocolVersion, FrameType::ack, id, p};
}

ProtocolFrame make_error(std::uint64_t id, std::optional<std::uint64_t> ref, std::string_view code,
                         std::string_view message) {
  Json p;
  p["ref"] = ref ? Json(*ref) : Json(nullptr);
  p["code"] = code;
  p["message"] = message;
  return {kProtocolVersion, FrameType::error, id, p};
}

sensor::SensorFrame spoof_frame(const ProtocolFrame& f) {
  if (f.type != FrameType::spoof) throw Error(Errc::protocol_violation, "not a spoof frame");
  return sensor::frame_from_json(f.payload);
}

}  // namespace sandbox::device
