#include "sandbox/session/config.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/sensor/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sandbox::session {
namespace {

Json window_json(const sensor::TraceWindow& w) {
  Json j;
  j["start_ms"] = w.start_ms;
  j["duration_ms"] = w.duration_ms;
  return j;
}

sensor::TraceWindow window_from(const Json& j) {
  sensor::TraceWindow w;
  w.start_ms = j.value("start_ms", std::int64_t{0});
  w.duration_ms = j.at("duration_ms").get<std::int64_t>();
  return w;
}

void only_keys(const Json& j, const char* what, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
      throw Error(Errc::invalid_request, std::string(what) + ": unknown field '" + k + "'");
    }
  }
}

}  // namespace

void check_config(const SessionConfig& c) {
  if (c.app_suite.empty()) throw Error(Errc::invalid_request, "app_suite must not be empty");
  const auto& p = c.snapshot_policy;
  if (p.base_delay_ms <= 0) throw Error(Errc::invalid_request, "snapshot base delay must be positive");
  if (p.jitter_ms < 0 || p.jitter_ms >= p.base_delay_ms) {
    throw Error(Errc::invalid_request, "snapshot jitter must be in [0, base delay)");
  }
  if (p.interval_ms < 0) throw Error(Errc::invalid_request, "snapshot interval must be >= 0");
  if (!(c.clock_scale > 0.0) || !std::isfinite(c.clock_scale)) {
    throw Error(Errc::invalid_request, "clock_scale must be a positive number");
  }
  if (c.launch_spacing_ms < 0) throw Error(Errc::invalid_request, "launch_spacing_ms must be >= 0");
  for (const auto& i : c.interactions) {
    if (i.t < 0) throw Error(Errc::invalid_request, "interaction times must be >= 0");
    if (std::find(c.app_suite.begin(), c.app_suite.end(), i.app_id) == c.app_suite.end()) {
      throw Error(Errc::invalid_request, "interaction targets '" + i.app_id + "', which is not in the suite");
    }
    if (!i.extras.is_object()) throw Error(Errc::invalid_request, "interaction extras must be an object");
  }
}

Json to_json(const TraceSource& t) {
  Json j;
  if (const auto* f = std::get_if<TraceFile>(&t)) {
    j["path"] = f->path;
  } else if (const auto* s = std::get_if<TraceScript>(&t)) {
    Json script;
    script["window"] = window_json(s->window);
    Json frames = Json::array();
    for (const auto& f : s->frames) frames.push_back(sensor::to_json(f));
    script["frames"] = frames;
    j["script"] = script;
  } else {
    const auto& y = std::get<TraceSynth>(t);
    Json synth;
    if (y.persona_path) {
      synth["persona"] = *y.persona_path;
    } else {
      synth["persona"] = y.persona_request;
    }
    synth["window"] = window_json(y.window);
    synth["seed"] = y.seed;
    synth["rates"] = sensor::to_json(y.rates);
    synth["initial_steps"] = y.initial_steps;
    j["synth"] = synth;
  }
  return j;
}

TraceSource trace_source_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) {
    throw Error(Errc::invalid_request, "trace must be exactly one of {path}, {script}, {synth}");
  }
  if (j.contains("path")) return TraceFile{j["path"].get<std::string>()};
  if (j.contains("script")) {
    const Json& s = j["script"];
    only_keys(s, "trace script", {"window", "frames"});
    TraceScript out;
    out.window = window_from(s.at("window"));
    for (const auto& f : s.value("frames", Json::array())) {
      sensor::SensorFrame frame = sensor::frame_from_json(f);
      if (const auto why = sensor::check_frame(frame); !why.empty()) throw Error(Errc::invalid_request, why);
      out.frames.push_back(std::move(frame));
    }
    std::stable_sort(out.frames.begin(), out.frames.end(), sensor::canonical_less);
    return out;
  }
  if (j.contains("synth")) {
    const Json& s = j["synth"];
    only_keys(s, "trace synth", {"persona", "window", "seed", "rates", "initial_steps"});
    TraceSynth out;
    const Json& persona = s.at("persona");
    if (persona.is_string()) {
      out.persona_path = persona.get<std::string>();
    } else if (persona.is_object()) {
      out.persona_request = persona;
    } else {
      throw Error(Errc::invalid_request, "synth persona must be a path or a request object");
    }
    out.window = window_from(s.at("window"));
    out.seed = s.value("seed", std::uint64_t{0});
    if (s.contains("rates")) out.rates = sensor::sample_rates_from_json(s["rates"]);
    out.initial_steps = s.value("initial_steps", std::int64_t{0});
    return out;
  }
  throw Error(Errc::invalid_request, "trace must be one of {path}, {script}, {synth}");
}

Json to_json(const SessionConfig& c) {
  Json j;
  j["session_id"] = c.session_id;
  j["persona_id"] = c.persona_id;
  j["trace"] = to_json(c.trace);
  j["agent"] = c.agent.to_string();
  j["app_suite"] = c.app_suite;
  j["targets"] = c.targets;
  j["launch_spacing_ms"] = c.launch_spacing_ms;
  Json policy;
  policy["base_delay_ms"] = c.snapshot_policy.base_delay_ms;
  policy["jitter_ms"] = c.snapshot_policy.jitter_ms;
  policy["interval_ms"] = c.snapshot_policy.interval_ms;
  j["snapshot_policy"] = policy;
  Json interactions = Json::array();
  for (const auto& i : c.interactions) {
    Json e;
    e["t"] = i.t;
    e["app_id"] = i.app_id;
    e["extras"] = i.extras;
    interactions.push_back(e);
  }
  j["interactions"] = interactions;
  j["clock_scale"] = c.clock_scale;
  j["seed"] = c.seed;
  return j;
}

SessionConfig session_config_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(Errc::invalid_request, "session config must be an object");
  only_keys(j, "session config",
            {"session_id", "persona_id", "trace", "agent", "app_suite", "targets", "launch_spacing_ms",
             "snapshot_policy", "interactions", "clock_scale", "seed"});
  SessionConfig c;
  c.base_dir = base_dir;
  try {
    c.session_id = j.value("session_id", std::string());
    c.persona_id = j.value("persona_id", std::string());
    c.trace = trace_source_from_json(j.at("trace"));
    if (j.contains("agent")) c.agent = net::parse_endpoint(j["agent"].get<std::string>());
    c.app_suite = j.at("app_suite").get<std::vector<std::string>>();
    c.targets = j.value("targets", std::vector<std::string>{});
    c.launch_spacing_ms = j.value("launch_spacing_ms", c.launch_spacing_ms);
    if (j.contains("snapshot_policy")) {
      const Json& p = j["snapshot_policy"];
      only_keys(p, "snapshot_policy", {"base_delay_ms", "jitter_ms", "interval_ms"});
      c.snapshot_policy.base_delay_ms = p.value("base_delay_ms", c.snapshot_policy.base_delay_ms);
      c.snapshot_policy.jitter_ms = p.value("jitter_ms", c.snapshot_policy.jitter_ms);
      c.snapshot_policy.interval_ms = p.value("interval_ms", c.snapshot_policy.interval_ms);
    }
    for (const auto& e : j.value("interactions", Json::array())) {
      only_keys(e, "interaction", {"t", "app_id", "extras"});
      c.interactions.push_back({e.at("t").get<std::int64_t>(), e.at("app_id").get<std::string>(),
                                e.value("extras", Json::object())});
    }
    c.clock_scale = j.value("clock_scale", c.clock_scale);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_request, std::string("session config: ") + e.what());
  }
  check_config(c);
  return c;
}

SessionConfig load_session_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, path + " is not valid JSON");
  return session_config_from_json(j, std::filesystem::path(path).parent_path().string());
}

std::string config_digest(const SessionConfig& c) {
  // Where the agent listens says nothing about the experiment itself.
  Json j = to_json(c);
  j.erase("session_id");
  j.erase("agent");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(dump_line(j))));
  return buf;
}

std::string effective_session_id(const SessionConfig& c) {
  return c.session_id.empty() ? "session-" + config_digest(c).substr(0, 12) : c.session_id;
}

std::int64_t launch_time(const SessionConfig& c, std::size_t app_index) {
  return static_cast<std::int64_t>(app_index) * c.launch_spacing_ms;
}

std::vector<ScheduledSnapshot> schedule_snapshots(const SessionConfig& c, std::int64_t window_ms) {
  check_config(c);
  const auto& p = c.snapshot_policy;
  std::vector<std::pair<std::size_t, ScheduledSnapshot>> out;
  for (std::size_t i = 0; i < c.app_suite.size(); ++i) {
    Rng rng(derive_seed(c.seed, fnv1a64("snapshot"), i));
    const std::int64_t first = launch_time(c, i) + p.base_delay_ms + rng.uniform_int(-p.jitter_ms, p.jitter_ms);
    if (first > window_ms) {
      throw Error(Errc::window_too_short, "first " + c.app_suite[i] + " snapshot at " + std::to_string(first) +
                                              " ms is past the " + std::to_string(window_ms) + " ms window");
    }
    out.push_back({i, {c.app_suite[i], first, false}});
    if (p.interval_ms > 0) {
      for (std::int64_t t = first + p.interval_ms; t <= window_ms; t += p.interval_ms) {
        out.push_back({i, {c.app_suite[i], t, true}});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second.t != b.second.t ? a.second.t < b.second.t : a.first < b.first;
  });
  std::vector<ScheduledSnapshot> sorted;
  sorted.reserve(out.size());
  for (auto& [i, s] : out) sorted.push_back(std::move(s));
  return sorted;
}

}  // namespace sandbox::session
