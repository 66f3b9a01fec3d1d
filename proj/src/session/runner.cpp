#include "sandbox/session/runner.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/device/protocol.hpp"
#include "sandbox/persona/generate.hpp"
#include "sandbox/persona/persona.hpp"
#include "sandbox/sensor/trace.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <thread>

namespace sandbox::session {
namespace {

using Clock = std::chrono::steady_clock;
using device::FrameType;
using device::ProtocolFrame;

std::int64_t wall_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string resolve_path(const SessionConfig& c, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || c.base_dir.empty()) return path;
  return (std::filesystem::path(c.base_dir) / p).string();
}

enum class ActionKind { launch, interaction, frame, exhausted, snapshot };

struct Action {
  std::int64_t t;
  ActionKind kind;
  std::size_t index;  // into app_suite, interactions, frames or schedule
};

// Raised inside the loop when the session has to end early.
struct Abort {
  std::string code;
  std::string message;
};

class Session {
 public:
  Session(const SessionConfig& c, const ResolvedTrace& trace, const RunOptions& options)
      : c_(c), trace_(trace), options_(options) {}

  SessionRecord run();

 private:
  void emit(std::int64_t t, EventKind kind, Json data);
  ProtocolFrame request(const ProtocolFrame& f, FrameType expected);
  void pace(std::int64_t t);
  void take_snapshot(const ScheduledSnapshot& s);
  void emit_diff(std::int64_t t, const device::UiSnapshot& before, const device::UiSnapshot& after,
                 const char* pair);

  const SessionConfig& c_;
  const ResolvedTrace& trace_;
  const RunOptions& options_;
  SessionRecord record_;
  std::optional<RecordWriter> writer_;
  net::LineStream conn_;
  std::uint64_t next_id_ = 1;
  Clock::time_point start_;
  std::vector<sensor::SensorFrame> sent_;
  std::map<std::string, std::vector<device::UiSnapshot>> shots_;
  std::int64_t now_t_ = 0;
};

void Session::emit(std::int64_t t, EventKind kind, Json data) {
  now_t_ = std::max(now_t_, t);
  Event e{record_.events.size(), now_t_, kind, std::move(data), wall_now_ms()};
  if (writer_) writer_->append(e);
  record_.events.push_back(e);
  if (options_.on_event) options_.on_event(record_.events.back());
}

ProtocolFrame Session::request(const ProtocolFrame& f, FrameType expected) {
  std::string line = device::encode_frame(f);
  line.pop_back();
  if (!conn_.write_line(line)) throw Abort{"agent-disconnected", "agent closed the connection"};
  const auto reply = conn_.read_line();
  if (!reply) throw Abort{"agent-disconnected", "agent closed the connection"};
  ProtocolFrame in;
  try {
    in = device::decode_frame(*reply + "\n");
  } catch (const device::DecodeError& e) {
    throw Abort{"protocol-violation", std::string("undecodable reply: ") + e.what()};
  }
  if (in.type == FrameType::error) {
    throw Abort{in.payload.value("code", std::string("error")), in.payload.value("message", std::string())};
  }
  if (in.type != expected) {
    throw Abort{"protocol-violation", "expected " + std::string(device::to_string(expected)) + ", got " +
                                          std::string(device::to_string(in.type))};
  }
  if (expected != FrameType::hello && in.payload.value("ref", std::uint64_t{0}) != f.id) {
    throw Abort{"protocol-violation", "reply refers to another request"};
  }
  return in;
}

void Session::pace(std::int64_t t) {
  const auto target = start_ + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double, std::milli>(static_cast<double>(t) / c_.clock_scale));
  while (true) {
    if (options_.abort != nullptr && options_.abort->load()) throw Abort{"aborted", "session aborted by operator"};
    const auto now = Clock::now();
    if (now >= target) return;
    std::this_thread::sleep_for(std::min<Clock::duration>(target - now, std::chrono::milliseconds(50)));
  }
}

void Session::emit_diff(std::int64_t t, const device::UiSnapshot& before, const device::UiSnapshot& after,
                        const char* pair) {
  const analysis::DiffReport report = analysis::diff_snapshots(before, after, sent_);
  char name[32];
  std::snprintf(name, sizeof name, "reports/%04zu.json", record_.reports.size() + 1);
  const std::string ref = name;
  if (writer_) writer_->write_report(ref, report);
  record_.reports.emplace(ref, report);
  Json data;
  data["ref"] = ref;
  data["app_id"] = report.app_id;
  data["pair"] = pair;
  data["before"] = report.before_ref;
  data["after"] = report.after_ref;
  data["verdict"] = analysis::to_string(report.verdict);
  emit(t, EventKind::diff_emitted, data);
}

void Session::take_snapshot(const ScheduledSnapshot& s) {
  const ProtocolFrame reply = request(device::make_snapshot_req(next_id_++, s.app_id, s.t), FrameType::snapshot);
  device::UiSnapshot snap;
  try {
    snap = device::snapshot_from_json(reply.payload.at("snapshot"));
  } catch (const Error& e) {
    throw Abort{"protocol-violation", e.what()};
  }
  if (snap.app_id != s.app_id) throw Abort{"protocol-violation", "snapshot for the wrong app"};
  Json data;
  data["app_id"] = s.app_id;
  data["periodic"] = s.periodic;
  data["snapshot"] = device::to_json(snap);
  emit(s.t, EventKind::snapshot_taken, data);
  auto& history = shots_[s.app_id];
  history.push_back(std::move(snap));
  if (history.size() >= 2) emit_diff(s.t, history[history.size() - 2], history.back(), "consecutive");
}

SessionRecord Session::run() {
  const auto& plan = trace_.plan;
  const std::int64_t window = plan.window.duration_ms;
  const std::vector<ScheduledSnapshot> schedule = schedule_snapshots(c_, window);

  try {
    conn_ = net::LineStream::connect(c_.agent, options_.connect_timeout_ms);
  } catch (const Error& e) {
    throw Error(Errc::agent_unreachable, e.what());
  }
  try {
    request(device::make_hello(next_id_++, "orchestrator", c_.app_suite), FrameType::hello);
  } catch (const Abort& a) {
    if (a.code == "app-mismatch") throw Error(Errc::app_mismatch, a.message);
    if (a.code == "agent-disconnected") throw Error(Errc::agent_unreachable, a.message);
    throw Error(Errc::protocol_violation, a.code + ": " + a.message);
  }

  record_.session_id = effective_session_id(c_);
  record_.config_digest = config_digest(c_);
  record_.config = to_json(c_);
  record_.config["session_id"] = record_.session_id;
  record_.started_ms = wall_now_ms();
  if (options_.record_dir) writer_.emplace(*options_.record_dir, record_);

  std::vector<Action> actions;
  for (std::size_t i = 0; i < c_.app_suite.size(); ++i) actions.push_back({launch_time(c_, i), ActionKind::launch, i});
  for (std::size_t i = 0; i < c_.interactions.size(); ++i) {
    actions.push_back({c_.interactions[i].t, ActionKind::interaction, i});
  }
  for (std::size_t i = 0; i < plan.frames.size(); ++i) actions.push_back({plan.frames[i].t, ActionKind::frame, i});
  if (trace_.exhausted_early) {
    actions.push_back({plan.frames.empty() ? 0 : plan.frames.back().t, ActionKind::exhausted, 0});
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) actions.push_back({schedule[i].t, ActionKind::snapshot, i});
  std::stable_sort(actions.begin(), actions.end(), [](const Action& a, const Action& b) {
    return a.t != b.t ? a.t < b.t : static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });

  start_ = Clock::now();
  SessionStatus status = SessionStatus::completed;
  try {
    for (const Action& a : actions) {
      pace(a.t);
      switch (a.kind) {
        case ActionKind::launch: {
          const auto& app = c_.app_suite[a.index];
          request(device::make_app_launch(next_id_++, app, a.t), FrameType::ack);
          emit(a.t, EventKind::launch, Json{{"app_id", app}});
          break;
        }
        case ActionKind::interaction: {
          const Interaction& in = c_.interactions[a.index];
          request(device::make_app_launch(next_id_++, in.app_id, a.t, in.extras), FrameType::ack);
          emit(a.t, EventKind::launch, Json{{"app_id", in.app_id}, {"extras", in.extras}});
          break;
        }
        case ActionKind::frame: {
          const sensor::SensorFrame& f = plan.frames[a.index];
          request(device::make_spoof(next_id_++, f), FrameType::ack);
          sent_.push_back(f);
          emit(a.t, EventKind::frame_sent, Json{{"index", a.index}, {"frame", sensor::to_json(f)}});
          break;
        }
        case ActionKind::exhausted:
          emit(a.t, EventKind::warning,
               Json{{"code", "trace-exhausted-early"},
                    {"message", "trace ended after " + std::to_string(plan.frames.size()) + " frames"}});
          break;
        case ActionKind::snapshot:
          take_snapshot(schedule[a.index]);
          break;
      }
    }
    pace(window);
    for (const auto& app : c_.app_suite) {
      const auto it = shots_.find(app);
      if (it != shots_.end() && it->second.size() >= 2) {
        emit_diff(now_t_, it->second.front(), it->second.back(), "baseline_latest");
      }
    }
  } catch (const Abort& a) {
    status = SessionStatus::aborted;
    emit(now_t_, EventKind::error, Json{{"code", a.code}, {"message", a.message}});
  }
  conn_.close();
  record_.status = status;
  record_.ended_ms = wall_now_ms();
  if (writer_) writer_->finish(status, record_.ended_ms);
  return std::move(record_);
}

}  // namespace

ResolvedTrace resolve_trace(const SessionConfig& c) {
  ResolvedTrace out;
  if (const auto* f = std::get_if<TraceFile>(&c.trace)) {
    sensor::LoadedTrace loaded = sensor::load_trace(resolve_path(c, f->path));
    out.plan = std::move(loaded.plan);
    out.exhausted_early = loaded.exhausted_early;
  } else if (const auto* s = std::get_if<TraceScript>(&c.trace)) {
    if (s->window.duration_ms <= 0) throw Error(Errc::invalid_window, "script window must have a positive duration");
    out.plan.persona_id = c.persona_id;
    out.plan.seed = c.seed;
    out.plan.window = s->window;
    out.plan.clock_scale = c.clock_scale;
    out.plan.sample_rates.clear();
    out.plan.frames = s->frames;
    for (const auto& fr : s->frames) {
      if (fr.t > s->window.duration_ms) throw Error(Errc::invalid_window, "script frame past the window");
    }
  } else {
    const auto& y = std::get<TraceSynth>(c.trace);
    const persona::Persona p = y.persona_path
                                   ? persona::load_persona(resolve_path(c, *y.persona_path))
                                   : persona::generate_persona(persona::parse_request(y.persona_request));
    sensor::SynthOptions options;
    options.persona_id = p.id;
    options.clock_scale = c.clock_scale;
    options.initial_steps = y.initial_steps;
    out.plan = sensor::synthesize_trace(p.sensor_profile, y.window, y.seed, y.rates, options);
  }
  return out;
}

SessionRecord run_session(const SessionConfig& c, const ResolvedTrace& trace, const RunOptions& options) {
  check_config(c);
  return Session(c, trace, options).run();
}

SessionRecord run_session(const SessionConfig& c, const RunOptions& options) {
  check_config(c);
  return run_session(c, resolve_trace(c), options);
}

std::vector<device::UiSnapshot> snapshots_of(const SessionRecord& r, std::string_view app_id) {
  std::vector<device::UiSnapshot> out;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::snapshot_taken && e.data.value("app_id", std::string()) == app_id) {
      out.push_back(device::snapshot_from_json(e.data.at("snapshot")));
    }
  }
  return out;
}

std::optional<analysis::DiffReport> final_report(const SessionRecord& r, std::string_view app_id) {
  for (auto it = r.events.rbegin(); it != r.events.rend(); ++it) {
    if (it->kind != EventKind::diff_emitted || it->data.value("app_id", std::string()) != app_id ||
        it->data.value("pair", std::string()) != "baseline_latest") {
      continue;
    }
    const auto rep = r.reports.find(it->data.value("ref", std::string()));
    if (rep != r.reports.end()) return rep->second;
  }
  return std::nullopt;
}

}  // namespace sandbox::session
