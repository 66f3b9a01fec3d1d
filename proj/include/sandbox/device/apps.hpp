#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/common/regions.hpp"
#include "sandbox/device/ui.hpp"
#include "sandbox/sensor/channel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sandbox::device {

inline constexpr std::string_view kFitness = "fitness";
inline constexpr std::string_view kWeather = "weather";
inline constexpr std::string_view kRideshare = "rideshare";
inline constexpr std::string_view kShop = "shop";
inline constexpr std::string_view kSocialFeed = "social_feed";

const std::vector<std::string>& known_app_ids();
bool is_known_app(std::string_view id);

// Tunables for the mock apps. Defaults are recorded here rather than baked
// into the transition rules so experiments can move them.
struct AppSettings {
  std::vector<std::int64_t> badge_thresholds{5000, 10000, 20000};
  double day_start_hour = 6.0;  // day is [day_start, night_start)
  double night_start_hour = 20.0;
  std::int64_t baseline_epoch_ms = 1780315200000LL;  // 2026-06-01 12:00 UTC
  std::string timezone = "America/New_York";
  std::string home_region = "US";
  // Region id -> currency the rideshare app serves; anything else is unavailable.
  std::vector<std::pair<std::string, std::string>> rideshare_service{{"US", "USD"}, {"CA", "CAD"}};
};

// Everything an app may read besides its own state.
struct AppContext {
  const AppSettings* settings = nullptr;
  const RegionTable* regions = nullptr;
  std::uint64_t seed = 0;
};

struct FitnessState {
  std::int64_t step_total = 0;
  std::vector<std::int64_t> badges;  // thresholds reached, ascending

  friend bool operator==(const FitnessState&, const FitnessState&) = default;
};

enum class DayMode { day, night };

struct WeatherState {
  DayMode mode = DayMode::day;
  std::string forecast_region;
  std::int64_t clock_epoch_ms = 0;  // last spoofed wall clock
  int utc_offset_min = 0;

  friend bool operator==(const WeatherState&, const WeatherState&) = default;
};

struct RideshareState {
  std::string region;
  std::string currency;
  bool available = true;

  friend bool operator==(const RideshareState&, const RideshareState&) = default;
};

struct ShopState {
  std::string locale_region;  // changes only through an explicit region select

  friend bool operator==(const ShopState&, const ShopState&) = default;
};

struct SocialFeedState {
  std::vector<int> post_order;

  friend bool operator==(const SocialFeedState&, const SocialFeedState&) = default;
};

using MockAppState = std::variant<FitnessState, WeatherState, RideshareState, ShopState, SocialFeedState>;

std::string_view app_id_of(const MockAppState& s);

// State before any frame arrives. Throws Error(app_mismatch) for unknown ids.
MockAppState initial_state(std::string_view app_id, const AppContext& ctx);

// Pure transition; frames on channels the app ignores return the state unchanged.
MockAppState mock_transition(const MockAppState& s, const sensor::SensorFrame& frame, const AppContext& ctx);

// User-level input carried on app_launch extras (e.g. {"region_select": "IT"}).
MockAppState apply_extras(const MockAppState& s, const Json& extras, const AppContext& ctx);

std::vector<UiElement> render(const MockAppState& s, const AppContext& ctx);

Json to_json(const MockAppState& s);

// Region id for a coordinate; "unknown" outside the table.
std::string region_lookup(double lat, double lon, const RegionTable& table = RegionTable::bundled());

}  // namespace sandbox::device
