#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace sandbox::tz {

// Fixed standard-time UTC offsets for the zones the sandbox knows about.
// Daylight saving is not modeled. Also accepts "UTC", "UTC+hh:mm", "UTC-hh:mm".
std::optional<int> utc_offset_minutes(std::string_view zone);

bool known(std::string_view zone);

// Local hour of day in [0, 24) for an epoch timestamp.
double local_hour(std::int64_t epoch_ms, int offset_minutes);

}  // namespace sandbox::tz
