#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/common/net.hpp"
#include "sandbox/sensor/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sandbox::session {

inline constexpr int kSessionSchemaVersion = 1;

struct SnapshotPolicy {
  std::int64_t base_delay_ms = 5000;  // after each launch
  std::int64_t jitter_ms = 1000;      // uniform in [-jitter, +jitter]
  std::int64_t interval_ms = 60000;   // periodic snapshots after the first; 0 disables

  friend bool operator==(const SnapshotPolicy&, const SnapshotPolicy&) = default;
};

// Where the frames come from.
struct TraceFile {
  std::string path;  // relative paths resolve against the config file
  friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

struct TraceScript {
  sensor::TraceWindow window;
  std::vector<sensor::SensorFrame> frames;  // sorted on load
  friend bool operator==(const TraceScript&, const TraceScript&) = default;
};

struct TraceSynth {
  // Either a persona file or an inline persona request ({"seed", "hints"}).
  std::optional<std::string> persona_path;
  Json persona_request;
  sensor::TraceWindow window;
  std::uint64_t seed = 0;
  sensor::SampleRates rates = sensor::default_sample_rates();
  std::int64_t initial_steps = 0;
  friend bool operator==(const TraceSynth&, const TraceSynth&) = default;
};

using TraceSource = std::variant<TraceFile, TraceScript, TraceSynth>;

// A user-level action replayed as an app_launch with extras, e.g. the shop's
// region picker: {"t": 20000, "app_id": "shop", "extras": {"region_select": "IT"}}.
struct Interaction {
  std::int64_t t = 0;
  std::string app_id;
  Json extras = Json::object();
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct SessionConfig {
  std::string session_id;  // empty: derived from the config digest
  std::string persona_id;
  TraceSource trace = TraceScript{};
  net::Endpoint agent{"127.0.0.1", 7400};
  std::vector<std::string> app_suite;
  std::vector<std::string> targets;  // report metadata only
  std::int64_t launch_spacing_ms = 1000;  // app i launches at i * spacing
  SnapshotPolicy snapshot_policy;
  std::vector<Interaction> interactions;
  double clock_scale = 1.0;
  std::uint64_t seed = 0;
  std::string base_dir;  // directory of the config file; not serialized

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

// Throws Error(invalid_request) on any broken invariant: empty suite,
// jitter >= base delay, clock_scale <= 0, negative times.
void check_config(const SessionConfig& c);

Json to_json(const TraceSource& t);
TraceSource trace_source_from_json(const Json& j);
Json to_json(const SessionConfig& c);
SessionConfig session_config_from_json(const Json& j, const std::string& base_dir = "");
SessionConfig load_session_config(const std::string& path);

// FNV-1a over the canonical JSON, as 16 hex digits.
std::string config_digest(const SessionConfig& c);
std::string effective_session_id(const SessionConfig& c);

struct ScheduledSnapshot {
  std::string app_id;
  std::int64_t t = 0;
  bool periodic = false;
  friend bool operator==(const ScheduledSnapshot&, const ScheduledSnapshot&) = default;
};

std::int64_t launch_time(const SessionConfig& c, std::size_t app_index);

// One snapshot per app at launch + base + U[-jitter, jitter], then every
// interval while inside [0, window_ms]. Sorted by time, then suite order.
// Throws Error(window_too_short) if some first snapshot falls past the window.
std::vector<ScheduledSnapshot> schedule_snapshots(const SessionConfig& c, std::int64_t window_ms);

}  // namespace sandbox::session
