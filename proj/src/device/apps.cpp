#include "sandbox/device/apps.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/common/timezone.hpp"

#include <algorithm>

namespace sandbox::device {
namespace {

std::string with_commas(std::int64_t n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return n < 0 ? "-" + out : out;
}

// Wire values are finite but unbounded; keep integer casts defined.
std::int64_t to_count(double v) {
  if (!(v > 0.0)) return 0;
  return static_cast<std::int64_t>(std::min(v, 9.0e15));
}

std::string badge_id(std::int64_t threshold) { return "steps-" + std::to_string(threshold); }

UiElement element(ElementKind kind, std::string text, std::map<std::string, std::string> attrs = {}) {
  return UiElement{kind, std::move(text), std::move(attrs), {}};
}

std::string region_name(const AppContext& ctx, const std::string& id) {
  if (const Region* r = ctx.regions->find(id)) return r->name;
  return "Unknown location";
}

std::optional<std::string> service_currency(const AppSettings& s, const std::string& region) {
  for (const auto& [id, currency] : s.rideshare_service) {
    if (id == region) return currency;
  }
  return std::nullopt;
}

DayMode mode_at(const AppSettings& s, std::int64_t epoch_ms, int offset_min) {
  const double h = tz::local_hour(epoch_ms, offset_min);
  return h >= s.day_start_hour && h < s.night_start_hour ? DayMode::day : DayMode::night;
}

struct Localized {
  const char* item;
  const char* price;
};

Localized shop_copy(const std::string& region) {
  if (region == "IT") return {"Moka pot, 6 cups", "18.99 EUR"};
  if (region == "CA") return {"Insulated winter jacket", "25.99 CAD"};
  if (region == "US") return {"Stainless water bottle", "19.99 USD"};
  return {"Gift card", "20.00 USD"};
}

}  // namespace

const std::vector<std::string>& known_app_ids() {
  static const std::vector<std::string> ids{std::string(kFitness), std::string(kWeather), std::string(kRideshare),
                                            std::string(kShop), std::string(kSocialFeed)};
  return ids;
}

bool is_known_app(std::string_view id) {
  const auto& ids = known_app_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string region_lookup(double lat, double lon, const RegionTable& table) { return table.lookup({lat, lon}); }

std::string_view app_id_of(const MockAppState& s) {
  switch (s.index()) {
    case 0: return kFitness;
    case 1: return kWeather;
    case 2: return kRideshare;
    case 3: return kShop;
    default: return kSocialFeed;
  }
}

MockAppState initial_state(std::string_view app_id, const AppContext& ctx) {
  const AppSettings& s = *ctx.settings;
  if (app_id == kFitness) return FitnessState{};
  if (app_id == kWeather) {
    WeatherState w;
    w.clock_epoch_ms = s.baseline_epoch_ms;
    w.utc_offset_min = tz::utc_offset_minutes(s.timezone).value_or(0);
    w.mode = mode_at(s, w.clock_epoch_ms, w.utc_offset_min);
    w.forecast_region = s.home_region;
    return w;
  }
  if (app_id == kRideshare) {
    RideshareState r;
    r.region = s.home_region;
    const auto currency = service_currency(s, r.region);
    r.available = currency.has_value();
    r.currency = currency.value_or("USD");
    return r;
  }
  if (app_id == kShop) return ShopState{s.home_region};
  if (app_id == kSocialFeed) {
    SocialFeedState f;
    f.post_order = {1, 2, 3, 4};
    Rng rng(derive_seed(ctx.seed, fnv1a64("social_feed")));
    for (std::size_t i = f.post_order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(f.post_order[i], f.post_order[j]);
    }
    return f;
  }
  throw Error(Errc::app_mismatch, "unknown app '" + std::string(app_id) + "'");
}

MockAppState mock_transition(const MockAppState& state, const sensor::SensorFrame& f, const AppContext& ctx) {
  using sensor::Channel;
  const AppSettings& s = *ctx.settings;
  if (const auto* fit = std::get_if<FitnessState>(&state)) {
    if (f.channel != Channel::step_counter || f.values.size() != 1) return state;
    FitnessState next = *fit;
    next.step_total = std::max(next.step_total, to_count(f.values[0]));
    for (auto threshold : s.badge_thresholds) {
      const bool have = std::find(next.badges.begin(), next.badges.end(), threshold) != next.badges.end();
      if (!have && next.step_total >= threshold) next.badges.push_back(threshold);
    }
    std::sort(next.badges.begin(), next.badges.end());
    return next;
  }
  if (const auto* w = std::get_if<WeatherState>(&state)) {
    WeatherState next = *w;
    if (f.channel == Channel::system_time && f.values.size() == 1) {
      next.clock_epoch_ms = to_count(f.values[0]);
    } else if (f.channel == Channel::time_zone) {
      const auto offset = tz::utc_offset_minutes(f.text);
      if (!offset) return state;
      next.utc_offset_min = *offset;
    } else if (f.channel == Channel::gps_location && f.values.size() == 4) {
      next.forecast_region = region_lookup(f.values[0], f.values[1], *ctx.regions);
      return next;
    } else {
      return state;
    }
    next.mode = mode_at(s, next.clock_epoch_ms, next.utc_offset_min);
    return next;
  }
  if (const auto* r = std::get_if<RideshareState>(&state)) {
    if (f.channel != Channel::gps_location || f.values.size() != 4) return state;
    RideshareState next = *r;
    next.region = region_lookup(f.values[0], f.values[1], *ctx.regions);
    if (const auto currency = service_currency(s, next.region)) {
      next.currency = *currency;
      next.available = true;
    } else {
      next.available = false;
    }
    return next;
  }
  // The shop gates locale on the account region, and the social feed is inert.
  return state;
}

MockAppState apply_extras(const MockAppState& state, const Json& extras, const AppContext& ctx) {
  const auto* shop = std::get_if<ShopState>(&state);
  if (shop == nullptr || !extras.is_object()) return state;
  const auto it = extras.find("region_select");
  if (it == extras.end() || !it->is_string()) return state;
  const std::string region = it->get<std::string>();
  if (ctx.regions->find(region) == nullptr) return state;
  return ShopState{region};
}

std::vector<UiElement> render(const MockAppState& state, const AppContext& ctx) {
  std::vector<UiElement> ui;
  if (const auto* fit = std::get_if<FitnessState>(&state)) {
    ui.push_back(element(ElementKind::card, "Steps today: " + with_commas(fit->step_total), {{"metric", "steps"}}));
    for (auto b : fit->badges) {
      ui.push_back(element(ElementKind::badge, with_commas(b) + " steps", {{"id", badge_id(b)}}));
    }
    if (!fit->badges.empty()) {
      const auto latest = fit->badges.back();
      ui.push_back(element(ElementKind::notification,
                           "Congratulations! You earned the " + with_commas(latest) + " steps badge",
                           {{"badge", badge_id(latest)}}));
    }
  } else if (const auto* w = std::get_if<WeatherState>(&state)) {
    const char* mode = w->mode == DayMode::day ? "day" : "night";
    ui.push_back(element(ElementKind::mode_flag, mode, {{"mode", mode}}));
    ui.push_back(element(ElementKind::banner, "Forecast: " + region_name(ctx, w->forecast_region),
                         {{"region", w->forecast_region}}));
    ui.push_back(element(ElementKind::card, "Hourly forecast"));
  } else if (const auto* r = std::get_if<RideshareState>(&state)) {
    ui.push_back(element(ElementKind::banner, "Where to?"));
    if (r->available) {
      const char* amount = r->currency == "CAD" ? "24.90" : "18.50";
      ui.push_back(element(ElementKind::price, std::string("Estimated fare ") + amount + " " + r->currency,
                           {{"currency", r->currency}}));
    } else {
      ui.push_back(element(ElementKind::message, "Rides are not available in this area",
                           {{"reason", "unsupported_region"}}));
    }
  } else if (const auto* shop = std::get_if<ShopState>(&state)) {
    const Localized copy = shop_copy(shop->locale_region);
    ui.push_back(element(ElementKind::banner, "Shop: " + region_name(ctx, shop->locale_region),
                         {{"region", shop->locale_region}}));
    ui.push_back(element(ElementKind::card, std::string("Recommended: ") + copy.item));
    ui.push_back(element(ElementKind::price, copy.price));
  } else if (const auto* feed = std::get_if<SocialFeedState>(&state)) {
    for (int post : feed->post_order) {
      ui.push_back(element(ElementKind::card, "Post " + std::to_string(post), {{"post", std::to_string(post)}}));
    }
  }
  return ui;
}

Json to_json(const MockAppState& state) {
  Json j;
  j["app_id"] = app_id_of(state);
  if (const auto* fit = std::get_if<FitnessState>(&state)) {
    j["step_total"] = fit->step_total;
    j["badges"] = fit->badges;
  } else if (const auto* w = std::get_if<WeatherState>(&state)) {
    j["mode"] = w->mode == DayMode::day ? "day" : "night";
    j["forecast_region"] = w->forecast_region;
    j["clock_epoch_ms"] = w->clock_epoch_ms;
    j["utc_offset_min"] = w->utc_offset_min;
  } else if (const auto* r = std::get_if<RideshareState>(&state)) {
    j["region"] = r->region;
    j["currency"] = r->currency;
    j["available"] = r->available;
  } else if (const auto* shop = std::get_if<ShopState>(&state)) {
    j["locale_region"] = shop->locale_region;
  } else if (const auto* feed = std::get_if<SocialFeedState>(&state)) {
    j["post_order"] = feed->post_order;
  }
  return j;
}

}  // namespace sandbox::device
