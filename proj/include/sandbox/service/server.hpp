#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/common/llm_client.hpp"
#include "sandbox/common/net.hpp"
#include "sandbox/session/record.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace sandbox::service {

struct ServiceConfig {
  net::Endpoint listen{"127.0.0.1", 8080};
  std::string store_dir = "sandbox-store";  // personas/ and sessions/ live here
  LlmClient* llm = nullptr;                 // for generator "llm"; optional
};

// The record as the API serves it: the same header, event and end objects
// that record.jsonl holds, gathered into one document.
Json record_to_json(const session::SessionRecord& r);

// HTTP API for the console:
//   GET  /api/personas                  stored personas
//   POST /api/personas                  generate from {"seed", "hints", "generator"}; 422 with violations
//   GET  /api/sessions                  session ids and status
//   POST /api/sessions                  start from a session config or scenario; 409 if the agent is busy
//   POST /api/sessions/{id}/abort
//   GET  /api/sessions/{id}             the record
//   GET  /api/sessions/{id}/events      server-sent events, one per record line; resumes
//                                       after ?cursor=N or Last-Event-ID
//   GET  /api/sessions/{id}/reports     diff reports referenced by the record
class Server {
 public:
  explicit Server(ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread; throws Error(bind_failure).
  void start();
  std::uint16_t port() const;
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sandbox::service
