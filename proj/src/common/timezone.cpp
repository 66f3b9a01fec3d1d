#include "sandbox/common/timezone.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace sandbox::tz {
namespace {

constexpr std::array<std::pair<std::string_view, int>, 20> kZones{{
    {"UTC", 0},
    {"Etc/UTC", 0},
    {"Europe/London", 0},
    {"Europe/Rome", 60},
    {"Europe/Paris", 60},
    {"Europe/Berlin", 60},
    {"Europe/Madrid", 60},
    {"America/New_York", -300},
    {"America/Toronto", -300},
    {"America/Chicago", -360},
    {"America/Denver", -420},
    {"America/Los_Angeles", -480},
    {"America/Vancouver", -480},
    {"America/Mexico_City", -360},
    {"America/Sao_Paulo", -180},
    {"Asia/Tokyo", 540},
    {"Asia/Kolkata", 330},
    {"Asia/Shanghai", 480},
    {"Australia/Sydney", 600},
    {"Africa/Lagos", 60},
}};

std::optional<int> parse_utc_offset(std::string_view s) {
  // UTC+hh:mm / UTC-hh:mm
  if (s.size() != 9 || s.substr(0, 3) != "UTC" || (s[3] != '+' && s[3] != '-') || s[6] != ':') {
    return std::nullopt;
  }
  int hh = 0, mm = 0;
  auto r1 = std::from_chars(s.data() + 4, s.data() + 6, hh);
  auto r2 = std::from_chars(s.data() + 7, s.data() + 9, mm);
  if (r1.ec != std::errc{} || r2.ec != std::errc{} || hh > 14 || mm > 59) return std::nullopt;
  const int total = hh * 60 + mm;
  return s[3] == '+' ? total : -total;
}

}  // namespace

std::optional<int> utc_offset_minutes(std::string_view zone) {
  for (const auto& [name, offset] : kZones) {
    if (name == zone) return offset;
  }
  return parse_utc_offset(zone);
}

bool known(std::string_view zone) { return utc_offset_minutes(zone).has_value(); }

double local_hour(std::int64_t epoch_ms, int offset_minutes) {
  constexpr std::int64_t kDayMs = 86'400'000;
  std::int64_t local = (epoch_ms + static_cast<std::int64_t>(offset_minutes) * 60'000) % kDayMs;
  if (local < 0) local += kDayMs;
  return static_cast<double>(local) / 3'600'000.0;
}

}  // namespace sandbox::tz
