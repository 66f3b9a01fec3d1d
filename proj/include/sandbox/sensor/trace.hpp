#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/sensor/synth.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace sandbox::sensor {

// JSON Lines: a header object, then one frame per line, LF terminated.
Json trace_header(const TracePlan& plan);
std::string serialize_trace(const TracePlan& plan);
void save_trace(const TracePlan& plan, const std::string& path);

Json to_json(const SampleRates& rates);
SampleRates sample_rates_from_json(const Json& j);

struct LoadedTrace {
  TracePlan plan;
  std::int64_t declared_frames = 0;
  // Fewer frames on disk than the header announced.
  bool exhausted_early = false;
};

// Throws Error(parse_error) naming the offending line.
LoadedTrace parse_trace(std::string_view text);
LoadedTrace load_trace(const std::string& path);

}  // namespace sandbox::sensor
