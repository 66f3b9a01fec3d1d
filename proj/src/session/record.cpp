#include "sandbox/session/record.hpp"

#include "sandbox/common/error.hpp"

#include <filesystem>
#include <sstream>

namespace sandbox::session {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kRecordTag = "sandbox-session";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string record_dir_of(const std::string& path) {
  const fs::path p(path);
  return fs::is_directory(p) ? p.string() : p.parent_path().string();
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::launch: return "launch";
    case EventKind::frame_sent: return "frame_sent";
    case EventKind::snapshot_taken: return "snapshot_taken";
    case EventKind::diff_emitted: return "diff_emitted";
    case EventKind::warning: return "warning";
    case EventKind::error: return "error";
  }
  return "?";
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::running: return "running";
    case SessionStatus::completed: return "completed";
    case SessionStatus::aborted: return "aborted";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::launch, EventKind::frame_sent, EventKind::snapshot_taken, EventKind::diff_emitted,
                 EventKind::warning, EventKind::error}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<SessionStatus> parse_status(std::string_view s) {
  for (auto k : {SessionStatus::running, SessionStatus::completed, SessionStatus::aborted}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

Json event_to_json(const Event& e) {
  Json j;
  j["seq"] = e.seq;
  j["t"] = e.t;
  j["type"] = to_string(e.kind);
  for (const auto& [k, v] : e.data.items()) j[k] = v;
  j["wall_ms"] = e.wall_ms;
  return j;
}

Event event_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "event must be an object");
  Event e;
  try {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.t = j.at("t").get<std::int64_t>();
    const auto kind = parse_event_kind(j.at("type").get<std::string>());
    if (!kind) throw Error(Errc::parse_error, "unknown event type " + j.at("type").dump());
    e.kind = *kind;
    e.wall_ms = j.at("wall_ms").get<std::int64_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::parse_error, std::string("event: ") + ex.what());
  }
  for (const auto& [k, v] : j.items()) {
    if (k != "seq" && k != "t" && k != "type" && k != "wall_ms") e.data[k] = v;
  }
  return e;
}

Json header_json(const SessionRecord& r) {
  Json j;
  j["record"] = kRecordTag;
  j["schema"] = kSessionSchemaVersion;
  j["session_id"] = r.session_id;
  j["config_digest"] = r.config_digest;
  j["started_ms"] = r.started_ms;
  j["config"] = r.config;
  return j;
}

RecordWriter::RecordWriter(const std::string& dir, const SessionRecord& header) : dir_(dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "reports", ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir + ": " + ec.message());
  out_.open(fs::path(dir) / kRecordFile, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(Errc::io_error, "cannot write " + dir);
  write_line(header_json(header));
}

void RecordWriter::write_line(const Json& j) {
  out_ << dump_line(j) << '\n';
  out_.flush();
  if (!out_) throw Error(Errc::io_error, "write failed in " + dir_);
}

void RecordWriter::append(const Event& e) { write_line(event_to_json(e)); }

void RecordWriter::write_report(const std::string& ref, const analysis::DiffReport& report) {
  const fs::path path = fs::path(dir_) / ref;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << dump_pretty(analysis::to_json(report));
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_error, "cannot move report into place: " + ec.message());
}

void RecordWriter::finish(SessionStatus status, std::int64_t ended_ms) {
  Json j;
  j["type"] = "end";
  j["status"] = to_string(status);
  j["ended_ms"] = ended_ms;
  write_line(j);
}

void persist_record(const SessionRecord& r, const std::string& dir) {
  RecordWriter w(dir, r);
  for (const auto& e : r.events) {
    if (e.kind == EventKind::diff_emitted) {
      const auto ref = e.data.value("ref", std::string());
      if (const auto it = r.reports.find(ref); it != r.reports.end()) w.write_report(ref, it->second);
    }
    w.append(e);
  }
  if (r.status != SessionStatus::running) w.finish(r.status, r.ended_ms);
}

LoadedRecord parse_record(std::string_view text) {
  LoadedRecord out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  bool ended = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string_view::npos) {
      if (!have_header) throw Error(Errc::parse_error, "line 1: header is incomplete");
      out.truncated = true;
      out.diagnostic = "truncated at byte " + std::to_string(text.size()) + ": dropped incomplete line " +
                       std::to_string(line_no) + " (" + std::to_string(text.size() - pos) + " bytes)";
      break;
    }
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const Json j = Json::parse(line, nullptr, false);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::parse_error, where + "not a JSON object");
    if (!have_header) {
      if (j.value("record", std::string()) != kRecordTag) throw Error(Errc::parse_error, where + "missing header");
      if (j.value("schema", 0) != kSessionSchemaVersion) {
        throw Error(Errc::parse_error, where + "unsupported schema " + j.value("schema", Json()).dump());
      }
      try {
        out.record.session_id = j.at("session_id").get<std::string>();
        out.record.config_digest = j.at("config_digest").get<std::string>();
        out.record.started_ms = j.at("started_ms").get<std::int64_t>();
        out.record.config = j.at("config");
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, where + e.what());
      }
      have_header = true;
      continue;
    }
    if (ended) throw Error(Errc::parse_error, where + "content after the end line");
    if (j.value("type", std::string()) == "end") {
      const auto status = parse_status(j.value("status", std::string()));
      if (!status || *status == SessionStatus::running) throw Error(Errc::parse_error, where + "bad end status");
      out.record.status = *status;
      out.record.ended_ms = j.value("ended_ms", std::int64_t{0});
      ended = true;
      continue;
    }
    try {
      Event e = event_from_json(j);
      if (e.seq != out.record.events.size()) throw Error(Errc::parse_error, "event seq out of order");
      if (!out.record.events.empty() && e.t < out.record.events.back().t) {
        throw Error(Errc::parse_error, "event time goes backwards");
      }
      out.record.events.push_back(std::move(e));
    } catch (const Error& e) {
      throw Error(Errc::parse_error, where + e.what());
    }
  }
  if (!have_header) throw Error(Errc::parse_error, "line 1: missing header");
  return out;
}

LoadedRecord load_record(const std::string& path) {
  const std::string dir = record_dir_of(path);
  const fs::path file = fs::is_directory(path) ? fs::path(path) / kRecordFile : fs::path(path);
  LoadedRecord out = parse_record(read_file(file.string()));
  for (const auto& e : out.record.events) {
    if (e.kind != EventKind::diff_emitted) continue;
    const auto ref = e.data.value("ref", std::string());
    const fs::path report = fs::path(dir) / ref;
    if (ref.empty() || !fs::exists(report)) {
      if (!out.diagnostic.empty()) out.diagnostic += "; ";
      out.diagnostic += "report " + ref + " is missing";
      continue;
    }
    const Json j = Json::parse(read_file(report.string()), nullptr, false);
    if (j.is_discarded()) throw Error(Errc::parse_error, report.string() + " is not valid JSON");
    out.record.reports.emplace(ref, analysis::diff_report_from_json(j));
  }
  return out;
}

std::string canonical_events(const SessionRecord& r) {
  std::string out;
  for (Event e : r.events) {
    e.wall_ms = 0;
    out += dump_line(event_to_json(e));
    out += '\n';
  }
  return out;
}

}  // namespace sandbox::session
