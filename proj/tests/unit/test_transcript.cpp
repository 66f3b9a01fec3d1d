// Byte-exact wire transcript of a small session, captured by a relay between
// the orchestrator and the agent. The same transcript is quoted in
// docs/protocol.md. Set SANDBOX_UPDATE_GOLDEN=1 to rewrite the golden file.
#include "sandbox/common/net.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/session/runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

using namespace sandbox;

namespace {

const std::string kSource = SANDBOX_SOURCE_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Forwards one connection, logging "> " for orchestrator lines and "< " for
// agent lines. Every orchestrator frame gets exactly one reply.
class Relay {
 public:
  explicit Relay(net::Endpoint upstream)
      : listener_(net::Listener::bind({"127.0.0.1", 0})), thread_([this, upstream] { run(upstream); }) {}
  ~Relay() {
    if (thread_.joinable()) thread_.join();
  }
  net::Endpoint endpoint() const { return {"127.0.0.1", listener_.port()}; }
  std::string finish() {
    thread_.join();
    return log_;
  }

 private:
  void run(const net::Endpoint& upstream) {
    auto down = listener_.accept(5000);
    if (!down) return;
    auto up = net::LineStream::connect(upstream);
    while (auto line = down->read_line()) {
      log_ += "> " + *line + "\n";
      up.write_line(*line);
      auto reply = up.read_line();
      if (!reply) break;
      log_ += "< " + *reply + "\n";
      down->write_line(*reply);
    }
  }

  net::Listener listener_;
  std::string log_;
  std::thread thread_;
};

session::SessionConfig transcript_config() {
  return session::session_config_from_json(Json::parse(R"({
    "session_id": "transcript",
    "trace": {"script": {
      "window": {"start_ms": 1780315200000, "duration_ms": 20000},
      "frames": [{"t": 10000, "channel": "gps_location", "values": [43.6532, -79.3832, 5.0, 0.0]}]}},
    "app_suite": ["rideshare"],
    "snapshot_policy": {"base_delay_ms": 5000, "jitter_ms": 0, "interval_ms": 10000},
    "clock_scale": 1000,
    "seed": 0
  })"));
}

}  // namespace

TEST_CASE("session wire transcript is byte-exact") {
  device::AgentConfig ac;
  ac.listen = {"127.0.0.1", 0};
  auto agent = device::run_sim_agent(ac);
  Relay relay(agent->endpoint());
  session::SessionConfig config = transcript_config();
  config.agent = relay.endpoint();
  const auto record = session::run_session(config);
  const std::string transcript = relay.finish();
  agent->stop();
  agent->wait();
  REQUIRE(record.status == session::SessionStatus::completed);

  const std::string golden_path = kSource + "/tests/golden/transcript.txt";
  if (std::getenv("SANDBOX_UPDATE_GOLDEN")) std::ofstream(golden_path, std::ios::binary) << transcript;
  CHECK(transcript == slurp(golden_path));

  // The documented example is the golden transcript.
  const std::string doc = slurp(kSource + "/docs/protocol.md");
  CHECK(doc.find("```\n" + transcript + "```\n") != std::string::npos);
}
