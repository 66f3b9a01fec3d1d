#pragma once

#include "sandbox/common/net.hpp"
#include "sandbox/common/regions.hpp"
#include "sandbox/device/apps.hpp"
#include "sandbox/device/protocol.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace sandbox::device {

struct AgentConfig {
  net::Endpoint listen{"127.0.0.1", 7400};
  std::vector<std::string> apps = known_app_ids();
  std::uint64_t seed = 0;
  AppSettings settings;
  std::string region_table_path;  // empty: the bundled table
  // Fault injection: after this many spoof frames the agent drops the
  // connection without answering and shuts down. Negative disables it.
  std::int64_t fail_after_frames = -1;
};

Json to_json(const AgentConfig& c);
// Missing fields keep their defaults; unknown app ids throw Error(app_mismatch).
AgentConfig agent_config_from_json(const Json& j);
AgentConfig load_agent_config(const std::string& path);

// The device side of the protocol without any I/O: frames in, frames out.
class DeviceSimulator {
 public:
  explicit DeviceSimulator(AgentConfig config);

  std::vector<ProtocolFrame> handle(const ProtocolFrame& in);

  UiSnapshot snapshot(std::string_view app_id, std::int64_t t) const;
  const MockAppState& state(std::string_view app_id) const;
  bool launched(std::string_view app_id) const { return launched_.count(std::string(app_id)) > 0; }
  std::uint64_t spoof_count() const { return spoof_count_; }
  // Latest frame per channel, as the device's sensor registry would hold it.
  const std::map<sensor::Channel, sensor::SensorFrame>& registry() const { return registry_; }
  const AgentConfig& config() const { return config_; }

 private:
  ProtocolFrame reply_error(const ProtocolFrame& in, std::string_view code, std::string_view message);

  AgentConfig config_;
  RegionTable regions_;
  AppContext ctx_;
  std::map<std::string, MockAppState> states_;
  std::set<std::string> launched_;
  std::map<sensor::Channel, sensor::SensorFrame> registry_;
  std::uint64_t next_id_ = 1;
  std::uint64_t spoof_count_ = 0;
};

// Simulated device agent over TCP. Serves one orchestrator connection at a
// time; each connection starts from a fresh device.
class SimAgent {
 public:
  ~SimAgent();
  SimAgent(const SimAgent&) = delete;
  SimAgent& operator=(const SimAgent&) = delete;

  net::Endpoint endpoint() const { return {config_.listen.host, port_}; }
  std::uint16_t port() const { return port_; }
  // True once the agent stopped on its own (fault injection) or via stop().
  bool stopped() const { return stopped_; }
  std::uint64_t sessions_served() const { return sessions_; }
  void stop();
  void wait();

 private:
  friend std::unique_ptr<SimAgent> run_sim_agent(const AgentConfig& config);
  explicit SimAgent(AgentConfig config);
  void serve();
  void serve_connection(net::LineStream& conn);

  AgentConfig config_;
  net::Listener listener_;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> stopped_{false};
  std::atomic<std::uint64_t> sessions_{0};
  std::mutex conn_mutex_;
  net::LineStream* active_ = nullptr;
};

// Binds (throws Error(bind_failure)) and starts serving on a background thread.
std::unique_ptr<SimAgent> run_sim_agent(const AgentConfig& config);

}  // namespace sandbox::device
