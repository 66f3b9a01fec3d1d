#pragma once

#include "sandbox/session/config.hpp"
#include "sandbox/session/record.hpp"
#include "sandbox/sensor/synth.hpp"

#include <atomic>
#include <functional>
#include <optional>
#include <string>

namespace sandbox::session {

struct ResolvedTrace {
  sensor::TracePlan plan;
  bool exhausted_early = false;  // a trace file that ends before its declared frame count
};

// Loads, builds or synthesizes the frames a config points at.
ResolvedTrace resolve_trace(const SessionConfig& c);

struct RunOptions {
  std::optional<std::string> record_dir;  // stream the record to disk as it grows
  std::function<void(const Event&)> on_event;
  const std::atomic<bool>* abort = nullptr;
  int connect_timeout_ms = 2000;
};

// Connects to the agent, launches the suite, streams frames paced by
// clock_scale and takes the scheduled snapshots. Throws Error(agent_unreachable)
// if the agent cannot be reached and Error(app_mismatch) if it lacks an app.
// A disconnect or error frame mid-session ends with status aborted and an
// error event; the partial log is kept.
SessionRecord run_session(const SessionConfig& c, const RunOptions& options = {});
SessionRecord run_session(const SessionConfig& c, const ResolvedTrace& trace, const RunOptions& options = {});

// Snapshots and diff reports pulled back out of a record.
std::vector<device::UiSnapshot> snapshots_of(const SessionRecord& r, std::string_view app_id);
// Baseline-vs-latest report for an app, if one was emitted.
std::optional<analysis::DiffReport> final_report(const SessionRecord& r, std::string_view app_id);

}  // namespace sandbox::session
