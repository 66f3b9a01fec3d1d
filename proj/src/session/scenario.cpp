#include "sandbox/session/scenario.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/session/runner.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sandbox::session {

bool is_scenario(const Json& j) { return j.is_object() && j.contains("session") && j.contains("expect"); }

Scenario scenario_from_json(const Json& j, const std::string& base_dir) {
  if (!is_scenario(j)) throw Error(Errc::invalid_request, "a scenario needs 'session' and 'expect'");
  Scenario s;
  try {
    s.name = j.value("name", std::string());
    s.description = j.value("description", std::string());
    Json agent = j.value("agent", Json::object());
    if (!agent.contains("listen")) agent["listen"] = "127.0.0.1:0";
    s.agent = device::agent_config_from_json(agent);
    s.session = session_config_from_json(j.at("session"), base_dir);
    const Json& e = j.at("expect");
    s.expect_app = e.at("app_id").get<std::string>();
    const auto verdict = e.value("verdict", std::string("adapted"));
    if (verdict == "adapted") {
      s.expect_verdict = analysis::Verdict::adapted;
    } else if (verdict == "no_change") {
      s.expect_verdict = analysis::Verdict::no_change;
    } else if (verdict == "inconclusive") {
      s.expect_verdict = analysis::Verdict::inconclusive;
    } else {
      throw Error(Errc::invalid_request, "unknown expected verdict " + verdict);
    }
    for (const auto& c : e.value("changes", Json::array())) {
      s.expect_changes.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::invalid_request, std::string("scenario: ") + ex.what());
  }
  std::sort(s.expect_changes.begin(), s.expect_changes.end());
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, path + " is not valid JSON");
  return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

ScenarioOutcome run_scenario(const Scenario& s, const std::optional<std::string>& record_dir) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioOutcome out;
  auto agent = device::run_sim_agent(s.agent);
  SessionConfig config = s.session;
  config.agent = agent->endpoint();
  RunOptions options;
  options.record_dir = record_dir;
  out.record = run_session(config, options);
  agent->stop();
  agent->wait();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  evaluate_scenario(s, out);
  return out;
}

void evaluate_scenario(const Scenario& s, ScenarioOutcome& out) {
  out.pass = false;
  out.detail.clear();
  out.report = final_report(out.record, s.expect_app);
  if (out.record.status != SessionStatus::completed) {
    out.detail = "session " + std::string(to_string(out.record.status));
    return;
  }
  if (!out.report) {
    out.detail = "no baseline_latest report for " + s.expect_app;
    return;
  }
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& c : out.report->changes) got.emplace_back(c.path, std::string(analysis::to_string(c.kind)));
  std::sort(got.begin(), got.end());
  if (got != s.expect_changes) {
    out.detail = "changes differ: got";
    for (const auto& [p, k] : got) out.detail += " " + p + ":" + k;
    return;
  }
  if (out.report->verdict != s.expect_verdict) {
    out.detail = "verdict " + std::string(analysis::to_string(out.report->verdict));
    return;
  }
  out.pass = true;
}

}  // namespace sandbox::session
