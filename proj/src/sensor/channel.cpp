#include "sandbox/sensor/channel.hpp"

#include "sandbox/common/error.hpp"

#include <cmath>

namespace sandbox::sensor {
namespace {

constexpr std::array<ChannelInfo, kChannelCount> kInfo{{
    {"accelerometer", 3, "m/s^2", false},
    {"gyroscope", 3, "rad/s", false},
    {"linear_acceleration", 3, "m/s^2", false},
    {"ambient_light", 1, "lux", false},
    {"step_counter", 1, "steps", false},
    {"step_detector", 1, "event", false},
    {"rotation_vector", 4, "unit quaternion (x, y, z, w)", false},
    {"gravity", 3, "m/s^2", false},
    {"magnetic_field", 3, "uT", false},
    {"orientation", 3, "deg (azimuth, pitch, roll)", false},
    {"gps_location", 4, "lat deg, lon deg, accuracy m, speed m/s", false},
    {"cell_tower", 3, "mcc, mnc, cell id", false},
    {"system_time", 1, "ms since unix epoch", false},
    {"time_zone", 0, "IANA zone id", true},
}};

}  // namespace

bool is_valid(Channel c) { return static_cast<std::size_t>(c) < kChannelCount; }

const ChannelInfo& info(Channel c) {
  if (!is_valid(c)) throw Error(Errc::unsupported_channel, "channel index out of range");
  return kInfo[static_cast<std::size_t>(c)];
}

std::string_view to_string(Channel c) { return info(c).name; }

std::optional<Channel> parse_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kInfo[i].name == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

std::string check_frame(const SensorFrame& f) {
  if (!is_valid(f.channel)) return "unknown channel";
  if (f.t < 0) return "negative timestamp";
  const auto& ci = info(f.channel);
  if (ci.textual) {
    if (!f.values.empty()) return std::string(ci.name) + " carries text, not numbers";
    if (f.text.empty()) return std::string(ci.name) + " needs a non-empty value";
    return {};
  }
  if (!f.text.empty()) return std::string(ci.name) + " does not carry text";
  if (f.values.size() != ci.arity) {
    return std::string(ci.name) + " expects " + std::to_string(ci.arity) + " values, got " +
           std::to_string(f.values.size());
  }
  for (double v : f.values) {
    if (!std::isfinite(v)) return std::string(ci.name) + " value is not finite";
  }
  return {};
}

Json to_json(const SensorFrame& f) {
  Json j;
  j["t"] = f.t;
  j["channel"] = to_string(f.channel);
  if (info(f.channel).textual) {
    j["values"] = f.text;
  } else {
    j["values"] = f.values;
  }
  return j;
}

SensorFrame frame_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "sensor frame must be an object");
  SensorFrame f;
  const auto t = j.find("t");
  if (t == j.end() || !t->is_number_integer()) throw Error(Errc::parse_error, "sensor frame needs integer 't'");
  f.t = t->get<std::int64_t>();
  const auto ch = j.find("channel");
  if (ch == j.end() || !ch->is_string()) throw Error(Errc::parse_error, "sensor frame needs 'channel'");
  const auto parsed = parse_channel(ch->get<std::string>());
  if (!parsed) throw Error(Errc::parse_error, "unknown channel '" + ch->get<std::string>() + "'");
  f.channel = *parsed;
  const auto v = j.find("values");
  if (v == j.end()) throw Error(Errc::parse_error, "sensor frame needs 'values'");
  if (v->is_string()) {
    f.text = v->get<std::string>();
  } else if (v->is_array()) {
    for (const auto& x : *v) {
      if (!x.is_number()) throw Error(Errc::parse_error, "sensor values must be numbers");
      f.values.push_back(x.get<double>());
    }
  } else {
    throw Error(Errc::parse_error, "sensor 'values' must be an array or a string");
  }
  return f;
}

bool canonical_less(const SensorFrame& a, const SensorFrame& b) {
  if (a.t != b.t) return a.t < b.t;
  return static_cast<int>(a.channel) < static_cast<int>(b.channel);
}

}  // namespace sandbox::sensor
