#pragma once

#include "sandbox/common/json.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sandbox::sensor {

// Declaration order is the canonical tie-break for frames sharing a timestamp.
enum class Channel : std::uint8_t {
  accelerometer,
  gyroscope,
  linear_acceleration,
  ambient_light,
  step_counter,
  step_detector,
  rotation_vector,
  gravity,
  magnetic_field,
  orientation,
  gps_location,
  cell_tower,
  system_time,
  time_zone,
};

inline constexpr std::size_t kChannelCount = 14;

inline constexpr std::array<Channel, kChannelCount> kAllChannels{
    Channel::accelerometer,  Channel::gyroscope,   Channel::linear_acceleration, Channel::ambient_light,
    Channel::step_counter,   Channel::step_detector, Channel::rotation_vector,   Channel::gravity,
    Channel::magnetic_field, Channel::orientation, Channel::gps_location,        Channel::cell_tower,
    Channel::system_time,    Channel::time_zone,
};

struct ChannelInfo {
  std::string_view name;
  std::size_t arity;  // numeric values; time_zone carries text instead
  std::string_view unit;
  bool textual;
};

const ChannelInfo& info(Channel c);
std::string_view to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view name);
bool is_valid(Channel c);

// One timestamped reading on one channel.
struct SensorFrame {
  std::int64_t t = 0;  // ms since session epoch
  Channel channel = Channel::accelerometer;
  std::vector<double> values;
  std::string text;  // time_zone only

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

// Empty string when the frame obeys arity/finiteness/t >= 0, else a diagnostic.
std::string check_frame(const SensorFrame& f);

Json to_json(const SensorFrame& f);
// Structural parse only (throws Error(parse_error)); arity is left to check_frame.
SensorFrame frame_from_json(const Json& j);

// Canonical order: by t, then by channel declaration order.
bool canonical_less(const SensorFrame& a, const SensorFrame& b);

}  // namespace sandbox::sensor
