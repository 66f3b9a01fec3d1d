#pragma once

#include "sandbox/analysis/diff.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/session/config.hpp"
#include "sandbox/session/record.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sandbox::session {

// A session config bundled with the simulated device it runs against and the
// change set its final report must show:
// {"name", "description", "agent": {...}, "session": {...},
//  "expect": {"app_id", "verdict", "changes": [["/price#0", "modified"], ...]}}
struct Scenario {
  std::string name;
  std::string description;
  device::AgentConfig agent;
  SessionConfig session;
  std::string expect_app;
  analysis::Verdict expect_verdict = analysis::Verdict::adapted;
  std::vector<std::pair<std::string, std::string>> expect_changes;  // (path, change kind), sorted
};

Scenario scenario_from_json(const Json& j, const std::string& base_dir = "");
Scenario load_scenario(const std::string& path);
// True if the JSON document is a scenario rather than a bare session config.
bool is_scenario(const Json& j);

struct ScenarioOutcome {
  SessionRecord record;
  std::optional<analysis::DiffReport> report;  // baseline vs latest for expect_app
  bool pass = false;
  std::string detail;  // what differed, empty on pass
  double seconds = 0.0;
};

// Starts a private agent on an ephemeral port, runs the session against it and
// checks the final report.
ScenarioOutcome run_scenario(const Scenario& s, const std::optional<std::string>& record_dir = std::nullopt);

// Fills report, pass and detail from out.record.
void evaluate_scenario(const Scenario& s, ScenarioOutcome& out);

}  // namespace sandbox::session
