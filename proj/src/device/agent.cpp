#include "sandbox/device/agent.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/timezone.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sandbox::device {

Json to_json(const AgentConfig& c) {
  Json j;
  j["listen"] = c.listen.to_string();
  j["apps"] = c.apps;
  j["seed"] = c.seed;
  Json thresholds;
  thresholds["badge_steps"] = c.settings.badge_thresholds;
  thresholds["day_start_hour"] = c.settings.day_start_hour;
  thresholds["night_start_hour"] = c.settings.night_start_hour;
  j["thresholds"] = thresholds;
  j["baseline_epoch_ms"] = c.settings.baseline_epoch_ms;
  j["timezone"] = c.settings.timezone;
  j["home_region"] = c.settings.home_region;
  Json service = Json::object();
  for (const auto& [region, currency] : c.settings.rideshare_service) service[region] = currency;
  j["rideshare_service"] = service;
  j["region_table"] = c.region_table_path;
  j["fail_after_frames"] = c.fail_after_frames;
  return j;
}

AgentConfig agent_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::invalid_request, "agent config must be an object");
  AgentConfig c;
  try {
    if (j.contains("listen")) c.listen = net::parse_endpoint(j.at("listen").get<std::string>());
    if (j.contains("apps")) c.apps = j.at("apps").get<std::vector<std::string>>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("thresholds")) {
      const Json& t = j.at("thresholds");
      if (t.contains("badge_steps")) c.settings.badge_thresholds = t.at("badge_steps").get<std::vector<std::int64_t>>();
      if (t.contains("day_start_hour")) c.settings.day_start_hour = t.at("day_start_hour").get<double>();
      if (t.contains("night_start_hour")) c.settings.night_start_hour = t.at("night_start_hour").get<double>();
    }
    if (j.contains("baseline_epoch_ms")) c.settings.baseline_epoch_ms = j.at("baseline_epoch_ms").get<std::int64_t>();
    if (j.contains("timezone")) c.settings.timezone = j.at("timezone").get<std::string>();
    if (j.contains("home_region")) c.settings.home_region = j.at("home_region").get<std::string>();
    if (j.contains("rideshare_service")) {
      c.settings.rideshare_service.clear();
      for (const auto& [region, currency] : j.at("rideshare_service").items()) {
        c.settings.rideshare_service.emplace_back(region, currency.get<std::string>());
      }
    }
    if (j.contains("region_table")) c.region_table_path = j.at("region_table").get<std::string>();
    if (j.contains("fail_after_frames")) c.fail_after_frames = j.at("fail_after_frames").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_request, std::string("agent config: ") + e.what());
  }
  if (c.apps.empty()) throw Error(Errc::invalid_request, "agent config needs at least one app");
  for (const auto& app : c.apps) {
    if (!is_known_app(app)) throw Error(Errc::app_mismatch, "unknown app '" + app + "'");
  }
  if (!tz::known(c.settings.timezone)) throw Error(Errc::invalid_request, "unknown timezone " + c.settings.timezone);
  return c;
}

AgentConfig load_agent_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, path + " is not valid JSON");
  return agent_config_from_json(j);
}

// ---------------------------------------------------------------------------

DeviceSimulator::DeviceSimulator(AgentConfig config)
    : config_(std::move(config)),
      regions_(config_.region_table_path.empty() ? RegionTable::bundled() : RegionTable::load(config_.region_table_path)) {
  ctx_.settings = &config_.settings;
  ctx_.regions = &regions_;
  ctx_.seed = config_.seed;
  for (const auto& app : config_.apps) states_.emplace(app, initial_state(app, ctx_));
}

ProtocolFrame DeviceSimulator::reply_error(const ProtocolFrame& in, std::string_view code, std::string_view message) {
  return make_error(next_id_++, in.id, code, message);
}

const MockAppState& DeviceSimulator::state(std::string_view app_id) const {
  const auto it = states_.find(std::string(app_id));
  if (it == states_.end()) throw Error(Errc::app_mismatch, "app '" + std::string(app_id) + "' is not installed");
  return it->second;
}

UiSnapshot DeviceSimulator::snapshot(std::string_view app_id, std::int64_t t) const {
  UiSnapshot s;
  s.app_id = std::string(app_id);
  s.t = t;
  s.ui_state = render(state(app_id), ctx_);
  return s;
}

std::vector<ProtocolFrame> DeviceSimulator::handle(const ProtocolFrame& in) {
  switch (in.type) {
    case FrameType::hello: {
      for (const auto& app : in.payload.value("apps", Json::array())) {
        const auto id = app.get<std::string>();
        if (!states_.count(id)) return {reply_error(in, "app-mismatch", "app '" + id + "' is not installed")};
      }
      return {make_hello(next_id_++, "agent", config_.apps)};
    }
    case FrameType::spoof: {
      const sensor::SensorFrame f = spoof_frame(in);
      ++spoof_count_;
      registry_[f.channel] = f;
      // Background apps see the sensors too, launched or not.
      for (auto& [id, st] : states_) st = mock_transition(st, f, ctx_);
      return {make_ack(next_id_++, in.id)};
    }
    case FrameType::app_launch: {
      const auto app = in.payload.at("app_id").get<std::string>();
      const auto it = states_.find(app);
      if (it == states_.end()) return {reply_error(in, "app-mismatch", "app '" + app + "' is not installed")};
      launched_.insert(app);
      it->second = apply_extras(it->second, in.payload.at("extras"), ctx_);
      return {make_ack(next_id_++, in.id)};
    }
    case FrameType::snapshot_req: {
      const auto app = in.payload.at("app_id").get<std::string>();
      if (!states_.count(app)) return {reply_error(in, "app-mismatch", "app '" + app + "' is not installed")};
      if (!launched_.count(app)) return {reply_error(in, "app-not-running", "app '" + app + "' was never launched")};
      Json p;
      p["ref"] = in.id;
      p["snapshot"] = to_json(snapshot(app, in.payload.at("t").get<std::int64_t>()));
      return {ProtocolFrame{kProtocolVersion, FrameType::snapshot, next_id_++, p}};
    }
    case FrameType::snapshot:
    case FrameType::ack:
    case FrameType::error:
      return {reply_error(in, "protocol-violation",
                          std::string(to_string(in.type)) + " frames only travel from agent to orchestrator")};
  }
  return {};
}

// ---------------------------------------------------------------------------

SimAgent::SimAgent(AgentConfig config) : config_(std::move(config)) {}

SimAgent::~SimAgent() {
  stop();
  wait();
}

std::unique_ptr<SimAgent> run_sim_agent(const AgentConfig& config) {
  // Validates the app list and region table before binding.
  (void)DeviceSimulator(config);
  std::unique_ptr<SimAgent> agent(new SimAgent(config));
  agent->listener_ = net::Listener::bind(config.listen);
  agent->port_ = agent->listener_.port();
  agent->thread_ = std::thread([a = agent.get()] { a->serve(); });
  return agent;
}

void SimAgent::stop() {
  stop_requested_ = true;
  std::lock_guard lock(conn_mutex_);
  if (active_ != nullptr) active_->shutdown();
}

void SimAgent::wait() {
  if (thread_.joinable()) thread_.join();
}

void SimAgent::serve() {
  while (!stop_requested_) {
    auto conn = listener_.accept(100);
    if (!conn) continue;
    {
      std::lock_guard lock(conn_mutex_);
      active_ = &*conn;
    }
    if (stop_requested_) conn->shutdown();
    ++sessions_;
    serve_connection(*conn);
    {
      std::lock_guard lock(conn_mutex_);
      active_ = nullptr;
    }
    conn->close();
  }
  listener_.close();
  stopped_ = true;
}

void SimAgent::serve_connection(net::LineStream& conn) {
  DeviceSimulator device(config_);
  std::uint64_t error_id = 1u << 30;
  while (auto line = conn.read_line()) {
    ProtocolFrame in;
    try {
      line->push_back('\n');
      in = decode_frame(*line);
    } catch (const DecodeError& e) {
      std::string encoded = encode_frame(make_error(error_id++, std::nullopt, to_string(e.kind()), e.what()));
      encoded.pop_back();
      conn.write_line(encoded);
      conn.shutdown();
      return;
    }
    if (in.type == FrameType::spoof && config_.fail_after_frames >= 0 &&
        device.spoof_count() >= static_cast<std::uint64_t>(config_.fail_after_frames)) {
      // Simulated crash: vanish without answering.
      stop_requested_ = true;
      conn.shutdown();
      return;
    }
    std::vector<ProtocolFrame> out;
    try {
      out = device.handle(in);
    } catch (const std::exception& e) {
      out = {make_error(error_id++, in.id, "protocol-violation", e.what())};
    }
    for (const auto& f : out) {
      std::string encoded = encode_frame(f);
      encoded.pop_back();
      if (!conn.write_line(encoded)) return;
    }
  }
}

}  // namespace sandbox::device
