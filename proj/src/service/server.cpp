#include "sandbox/service/server.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/persona/generate.hpp"
#include "sandbox/persona/persona.hpp"
#include "sandbox/persona/validate.hpp"
#include "sandbox/session/runner.hpp"
#include "sandbox/session/scenario.hpp"

#include <httplib.h>

#include <algorithm>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

namespace sandbox::service {
namespace {

namespace fs = std::filesystem;

constexpr const char* kJson = "application/json";

int status_for(Errc code) {
  switch (code) {
    case Errc::not_found: return 404;
    case Errc::conflict: return 409;
    case Errc::agent_unreachable:
    case Errc::bind_failure:
    case Errc::summarizer_unavailable:
    case Errc::generation_failed: return 502;
    case Errc::io_error: return 500;
    default: return 422;
  }
}

Json error_body(const Error& e) {
  Json j;
  j["error"]["code"] = to_string(e.code());
  j["error"]["message"] = e.what();
  return j;
}

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump_line(body), kJson);
}

bool safe_id(const std::string& id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  }) && id.front() != '.';
}

// Lines of a live record, shared between the session thread and readers.
struct LiveSession {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::string> lines;  // events only, serialized as on disk
  bool done = false;
  std::string endpoint;
  std::atomic<bool> abort{false};
  std::thread worker;
};

}  // namespace

Json record_to_json(const session::SessionRecord& r) {
  Json j;
  j["header"] = session::header_json(r);
  Json events = Json::array();
  for (const auto& e : r.events) events.push_back(session::event_to_json(e));
  j["events"] = events;
  if (r.status == session::SessionStatus::running) {
    j["end"] = nullptr;
  } else {
    j["end"]["type"] = "end";
    j["end"]["status"] = session::to_string(r.status);
    j["end"]["ended_ms"] = r.ended_ms;
  }
  return j;
}

struct Server::Impl {
  ServiceConfig config;
  httplib::Server http;
  std::thread thread;
  int bound_port = 0;
  std::mutex mu;
  std::map<std::string, std::shared_ptr<LiveSession>> live;
  std::map<std::string, std::string> busy_agents;  // endpoint -> session id

  fs::path personas_dir() const { return fs::path(config.store_dir) / "personas"; }
  fs::path sessions_dir() const { return fs::path(config.store_dir) / "sessions"; }

  void routes();
  void list_personas(httplib::Response& res);
  void create_persona(const httplib::Request& req, httplib::Response& res);
  void list_sessions(httplib::Response& res);
  void create_session(const httplib::Request& req, httplib::Response& res);
  void abort_session(const std::string& id, httplib::Response& res);
  void get_session(const std::string& id, httplib::Response& res);
  void get_reports(const std::string& id, httplib::Response& res);
  void stream_events(const std::string& id, const httplib::Request& req, httplib::Response& res);
  std::string unique_session_id(const std::string& base);
  void join_all();
};

void Server::Impl::routes() {
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      reply(res, status_for(e.code()), error_body(e));
    } catch (const std::exception& e) {
      reply(res, 500, error_body(Error(Errc::io_error, e.what())));
    }
  });
  http.Get("/api/personas", [this](const httplib::Request&, httplib::Response& res) { list_personas(res); });
  http.Post("/api/personas",
            [this](const httplib::Request& req, httplib::Response& res) { create_persona(req, res); });
  http.Get("/api/sessions", [this](const httplib::Request&, httplib::Response& res) { list_sessions(res); });
  http.Post("/api/sessions",
            [this](const httplib::Request& req, httplib::Response& res) { create_session(req, res); });
  http.Post(R"(/api/sessions/([^/]+)/abort)", [this](const httplib::Request& req, httplib::Response& res) {
    abort_session(req.matches[1], res);
  });
  http.Get(R"(/api/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
    stream_events(req.matches[1], req, res);
  });
  http.Get(R"(/api/sessions/([^/]+)/reports)", [this](const httplib::Request& req, httplib::Response& res) {
    get_reports(req.matches[1], res);
  });
  http.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    get_session(req.matches[1], res);
  });
}

void Server::Impl::list_personas(httplib::Response& res) {
  std::vector<fs::path> files;
  if (fs::exists(personas_dir())) {
    for (const auto& entry : fs::directory_iterator(personas_dir())) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Json out = Json::array();
  for (const auto& f : files) out.push_back(persona::to_json(persona::load_persona(f.string())));
  reply(res, 200, out);
}

void Server::Impl::create_persona(const httplib::Request& req, httplib::Response& res) {
  const Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw Error(Errc::invalid_request, "body is not JSON");
  const persona::PersonaRequest request = persona::parse_request(body);
  if (request.hints.age && (*request.hints.age < 13 || *request.hints.age > 100)) {
    // Surface the same rule the validator applies instead of a generic refusal.
    Json j = error_body(Error(Errc::invalid_request, "age " + std::to_string(*request.hints.age) + " outside [13, 100]"));
    j["error"]["violations"] = Json::array({Json{{"rule_id", "R5"}, {"severity", "error"},
                                                 {"message", "age must be in [13, 100]"}}});
    reply(res, 422, j);
    return;
  }
  persona::Persona p;
  try {
    p = persona::generate_persona(request, config.llm);
  } catch (const persona::PersonaRejected& e) {
    Json j = error_body(e);
    j["error"]["violations"] = persona::to_json(e.report())["violations"];
    reply(res, 422, j);
    return;
  }
  fs::create_directories(personas_dir());
  persona::save_persona(p, (personas_dir() / (p.id + ".json")).string());
  reply(res, 201, persona::to_json(p));
}

void Server::Impl::list_sessions(httplib::Response& res) {
  Json out = Json::array();
  std::vector<std::string> ids;
  if (fs::exists(sessions_dir())) {
    for (const auto& entry : fs::directory_iterator(sessions_dir())) {
      if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    Json s;
    s["session_id"] = id;
    try {
      s["status"] = session::to_string(session::load_record((sessions_dir() / id).string()).record.status);
    } catch (const Error&) {
      s["status"] = "unreadable";
    }
    out.push_back(s);
  }
  reply(res, 200, out);
}

std::string Server::Impl::unique_session_id(const std::string& base) {
  std::string id = base;
  for (int n = 2; fs::exists(sessions_dir() / id) || live.count(id); ++n) id = base + "-" + std::to_string(n);
  return id;
}

void Server::Impl::create_session(const httplib::Request& req, httplib::Response& res) {
  const Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw Error(Errc::invalid_request, "body is not JSON");

  std::optional<session::Scenario> scenario;
  session::SessionConfig config;
  if (session::is_scenario(body)) {
    scenario = session::scenario_from_json(body);
    config = scenario->session;
  } else {
    config = session::session_config_from_json(body);
  }
  const session::ResolvedTrace trace = session::resolve_trace(config);
  session::schedule_snapshots(config, trace.plan.window.duration_ms);  // window-too-short before we answer

  auto live_session = std::make_shared<LiveSession>();
  std::unique_ptr<device::SimAgent> agent;
  std::string id;
  {
    std::lock_guard lock(mu);
    if (!config.session_id.empty() && (live.count(config.session_id) || fs::exists(sessions_dir() / config.session_id))) {
      throw Error(Errc::conflict, "session " + config.session_id + " already exists");
    }
    if (!scenario) {
      const std::string endpoint = config.agent.to_string();
      if (const auto it = busy_agents.find(endpoint); it != busy_agents.end()) {
        throw Error(Errc::conflict, "agent " + endpoint + " is busy with session " + it->second);
      }
      live_session->endpoint = endpoint;
    }
    id = config.session_id.empty() ? unique_session_id(session::effective_session_id(config)) : config.session_id;
    if (!safe_id(id)) throw Error(Errc::invalid_request, "session id may only use letters, digits, '-', '_' and '.'");
    config.session_id = id;
    if (scenario) {
      // Scenarios bring their own device.
      agent = device::run_sim_agent(scenario->agent);
      config.agent = agent->endpoint();
    } else {
      busy_agents[live_session->endpoint] = id;
    }
    live[id] = live_session;
  }

  const fs::path dir = sessions_dir() / id;
  live_session->worker = std::thread([this, config, trace, dir, id, live_session, agent = std::move(agent)]() mutable {
    session::RunOptions options;
    options.record_dir = dir.string();
    options.abort = &live_session->abort;
    options.on_event = [&](const session::Event& e) {
      std::lock_guard lock(live_session->mu);
      live_session->lines.push_back(dump_line(session::event_to_json(e)));
      live_session->cv.notify_all();
    };
    try {
      session::run_session(config, trace, options);
    } catch (const Error& e) {
      // Nothing was recorded; leave a record that says why.
      session::SessionRecord r;
      r.session_id = id;
      r.config = session::to_json(config);
      r.status = session::SessionStatus::aborted;
      r.events.push_back({0, 0, session::EventKind::error,
                          Json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}}, 0});
      session::persist_record(r, dir.string());
      std::lock_guard lock(live_session->mu);
      live_session->lines.push_back(dump_line(session::event_to_json(r.events.back())));
    }
    if (agent) {
      agent->stop();
      agent->wait();
    }
    {
      std::lock_guard lock(mu);
      if (!live_session->endpoint.empty()) busy_agents.erase(live_session->endpoint);
    }
    std::lock_guard lock(live_session->mu);
    live_session->done = true;
    live_session->cv.notify_all();
  });

  Json out;
  out["session_id"] = id;
  out["status"] = "running";
  out["links"]["record"] = "/api/sessions/" + id;
  out["links"]["events"] = "/api/sessions/" + id + "/events";
  out["links"]["reports"] = "/api/sessions/" + id + "/reports";
  reply(res, 202, out);
}

void Server::Impl::abort_session(const std::string& id, httplib::Response& res) {
  std::shared_ptr<LiveSession> s;
  {
    std::lock_guard lock(mu);
    const auto it = live.find(id);
    if (it != live.end()) s = it->second;
  }
  if (!s) {
    if (!fs::exists(sessions_dir() / id)) throw Error(Errc::not_found, "no session " + id);
    throw Error(Errc::conflict, "session " + id + " is not running");
  }
  {
    std::lock_guard lock(s->mu);
    if (s->done) throw Error(Errc::conflict, "session " + id + " is not running");
  }
  s->abort = true;
  reply(res, 202, Json{{"session_id", id}, {"status", "aborting"}});
}

void Server::Impl::get_session(const std::string& id, httplib::Response& res) {
  if (!fs::exists(sessions_dir() / id / "record.jsonl")) {
    std::lock_guard lock(mu);
    if (live.count(id)) {
      // Accepted but not yet connected to its agent.
      reply(res, 200, Json{{"header", nullptr}, {"events", Json::array()}, {"end", nullptr}});
      return;
    }
  }
  if (!safe_id(id) || !fs::exists(sessions_dir() / id)) throw Error(Errc::not_found, "no session " + id);
  const session::LoadedRecord loaded = session::load_record((sessions_dir() / id).string());
  Json j = record_to_json(loaded.record);
  if (!loaded.diagnostic.empty()) j["diagnostic"] = loaded.diagnostic;
  reply(res, 200, j);
}

void Server::Impl::get_reports(const std::string& id, httplib::Response& res) {
  if (!safe_id(id) || !fs::exists(sessions_dir() / id)) throw Error(Errc::not_found, "no session " + id);
  const session::LoadedRecord loaded = session::load_record((sessions_dir() / id).string());
  Json out;
  out["session_id"] = id;
  out["reports"] = Json::array();
  for (const auto& e : loaded.record.events) {
    if (e.kind != session::EventKind::diff_emitted) continue;
    const auto ref = e.data.value("ref", std::string());
    const auto it = loaded.record.reports.find(ref);
    if (it == loaded.record.reports.end()) continue;
    Json r;
    r["ref"] = ref;
    r["pair"] = e.data.value("pair", std::string());
    r["report"] = analysis::to_json(it->second);
    out["reports"].push_back(r);
  }
  reply(res, 200, out);
}

void Server::Impl::stream_events(const std::string& id, const httplib::Request& req, httplib::Response& res) {
  std::uint64_t cursor = 0;
  if (req.has_param("cursor")) {
    cursor = std::stoull(req.get_param_value("cursor"));
  } else if (req.has_header("Last-Event-ID")) {
    cursor = std::stoull(req.get_header_value("Last-Event-ID")) + 1;
  }
  std::shared_ptr<LiveSession> s;
  {
    std::lock_guard lock(mu);
    const auto it = live.find(id);
    if (it != live.end()) s = it->second;
  }
  if (!s) {
    // Finished in an earlier run of the service: replay from the file.
    if (!safe_id(id) || !fs::exists(sessions_dir() / id)) throw Error(Errc::not_found, "no session " + id);
    s = std::make_shared<LiveSession>();
    for (const auto& e : session::load_record((sessions_dir() / id).string()).record.events) {
      s->lines.push_back(dump_line(session::event_to_json(e)));
    }
    s->done = true;
  }
  res.set_header("Cache-Control", "no-cache");
  res.set_chunked_content_provider("text/event-stream", [s, cursor](std::size_t, httplib::DataSink& sink) mutable {
    std::unique_lock lock(s->mu);
    s->cv.wait_for(lock, std::chrono::milliseconds(500), [&] { return s->done || cursor < s->lines.size(); });
    while (cursor < s->lines.size()) {
      const std::string chunk = "id: " + std::to_string(cursor) + "\ndata: " + s->lines[cursor] + "\n\n";
      ++cursor;
      if (!sink.write(chunk.data(), chunk.size())) return false;
    }
    if (s->done) {
      static const std::string end = "event: end\ndata: {}\n\n";
      sink.write(end.data(), end.size());
      sink.done();
      return true;
    }
    // Keeps the connection alive and notices clients that went away.
    static const std::string ping = ": ping\n\n";
    return sink.write(ping.data(), ping.size());
  });
}

void Server::Impl::join_all() {
  std::vector<std::shared_ptr<LiveSession>> sessions;
  {
    std::lock_guard lock(mu);
    for (auto& [id, s] : live) sessions.push_back(s);
  }
  for (auto& s : sessions) {
    s->abort = true;
    if (s->worker.joinable()) s->worker.join();
  }
}

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->routes();
}

Server::~Server() { stop(); }

void Server::start() {
  fs::create_directories(impl_->personas_dir());
  fs::create_directories(impl_->sessions_dir());
  auto& c = impl_->config;
  // httplib's default also sets SO_REUSEPORT, which would let a second server share the port.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
  });
  if (c.listen.port == 0) {
    impl_->bound_port = impl_->http.bind_to_any_port(c.listen.host);
  } else {
    impl_->bound_port = impl_->http.bind_to_port(c.listen.host, c.listen.port) ? c.listen.port : -1;
  }
  if (impl_->bound_port <= 0) throw Error(Errc::bind_failure, "cannot listen on " + c.listen.to_string());
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

std::uint16_t Server::port() const { return static_cast<std::uint16_t>(impl_->bound_port); }

void Server::stop() {
  if (!impl_) return;
  impl_->join_all();
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Server::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace sandbox::service
