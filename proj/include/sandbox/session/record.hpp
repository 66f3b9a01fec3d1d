#pragma once

#include "sandbox/analysis/diff.hpp"
#include "sandbox/common/json.hpp"
#include "sandbox/session/config.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sandbox::session {

enum class EventKind { launch, frame_sent, snapshot_taken, diff_emitted, warning, error };
enum class SessionStatus { running, completed, aborted };

std::string_view to_string(EventKind k);
std::string_view to_string(SessionStatus s);
std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<SessionStatus> parse_status(std::string_view s);

// One line of the evidence log. `t` is simulated session time; `wall_ms` is the
// only field that differs between two runs of the same config.
struct Event {
  std::uint64_t seq = 0;
  std::int64_t t = 0;
  EventKind kind = EventKind::launch;
  Json data = Json::object();  // kind-specific fields, flattened into the line
  std::int64_t wall_ms = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SessionRecord {
  std::string session_id;
  std::string config_digest;
  Json config;  // SessionConfig as JSON
  SessionStatus status = SessionStatus::running;
  std::int64_t started_ms = 0;
  std::int64_t ended_ms = 0;
  std::vector<Event> events;
  std::map<std::string, analysis::DiffReport> reports;  // by ref, e.g. "reports/0003.json"

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

Json event_to_json(const Event& e);
Event event_from_json(const Json& j);
Json header_json(const SessionRecord& r);

// Appends a record to a directory as it happens: record.jsonl plus one JSON
// document per diff report. Every line is flushed before the call returns.
class RecordWriter {
 public:
  // Creates the directory; throws Error(io_error).
  RecordWriter(const std::string& dir, const SessionRecord& header);
  void append(const Event& e);
  // Written before the diff_emitted event that references it.
  void write_report(const std::string& ref, const analysis::DiffReport& report);
  void finish(SessionStatus status, std::int64_t ended_ms);
  const std::string& dir() const { return dir_; }

 private:
  void write_line(const Json& j);
  std::string dir_;
  std::ofstream out_;
};

inline constexpr std::string_view kRecordFile = "record.jsonl";

void persist_record(const SessionRecord& r, const std::string& dir);

struct LoadedRecord {
  SessionRecord record;
  bool truncated = false;
  std::string diagnostic;  // empty unless something was dropped
};

// Parses record.jsonl text; reports are not resolved. An unterminated last line
// is dropped with a diagnostic. Throws Error(parse_error) with a line number
// for a missing header or a bad complete line.
LoadedRecord parse_record(std::string_view text);
// `path` is a record directory or its record.jsonl. Reports referenced by
// diff_emitted events are loaded from the directory.
LoadedRecord load_record(const std::string& path);

// Normalizes wall-clock fields so two runs can be byte-compared.
std::string canonical_events(const SessionRecord& r);

}  // namespace sandbox::session
