// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is the number of failing criteria.
#include "sandbox/analysis/diff.hpp"
#include "sandbox/cli/cli.hpp"
#include "sandbox/common/rng.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/device/protocol.hpp"
#include "sandbox/persona/validate.hpp"
#include "sandbox/sensor/synth.hpp"
#include "sandbox/session/runner.hpp"
#include "sandbox/session/scenario.hpp"

#include "oracles/diff_oracle.hpp"
#include "oracles/rule_oracle.hpp"
#include "oracles/trace_invariants.hpp"
#include "support/protocol_corpus.hpp"
#include "support/random_profile.hpp"
#include "support/random_ui.hpp"
#include "support/rule_fixtures.hpp"
#include "support/temp_dir.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace sandbox;

namespace {

namespace fs = std::filesystem;

const std::string kSource = SANDBOX_SOURCE_DIR;
constexpr std::int64_t kNoonJune1 = 1780315200000;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt_seconds(double s) {
  std::ostringstream ss;
  ss.precision(2);
  ss << std::fixed << s << " s";
  return ss.str();
}

// 1. Each scenario's final report holds exactly the expected change set, in
// under 10 s at clock_scale >= 1000.
Verdict behavior_reproduction() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kSource + "/scenarios")) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Verdict v;
  double slowest = 0;
  std::size_t passed = 0;
  for (const auto& f : files) {
    const session::Scenario s = session::load_scenario(f.string());
    const session::ScenarioOutcome out = session::run_scenario(s);
    slowest = std::max(slowest, out.seconds);
    const bool ok = out.pass && out.seconds < 10.0 && s.session.clock_scale >= 1000.0;
    if (ok) {
      ++passed;
    } else {
      v.pass = false;
      v.detail += s.name + ": " + (out.pass ? "too slow or clock_scale < 1000" : out.detail) + "; ";
    }
  }
  if (files.size() != 6) {
    v.pass = false;
    v.detail += "expected 6 scenario files; ";
  }
  v.detail += std::to_string(passed) + "/" + std::to_string(files.size()) + " scenarios, slowest " +
              fmt_seconds(slowest);
  return v;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

// 2. persona gen -> trace synth -> session run -> report show --json, three times.
Verdict determinism() {
  struct Run {
    std::string persona, trace, report_json;
    std::map<std::string, std::string> report_files;
  };
  std::vector<Run> runs;
  for (int i = 0; i < 3; ++i) {
    TempDir dir;
    Run run;
    if (cli({"persona", "gen", "--template", "--seed", "0", "--out", dir / "persona.json"}) != 0) {
      return {false, "persona gen failed"};
    }
    if (cli({"trace", "synth", "--persona", dir / "persona.json", "--seed", "0", "--start-ms",
             std::to_string(kNoonJune1), "--duration-ms", "120000", "--out", dir / "trace.jsonl"}) != 0) {
      return {false, "trace synth failed"};
    }
    Json config;
    config["trace"] = Json{{"path", "trace.jsonl"}};
    config["app_suite"] = Json::array({"fitness", "weather", "rideshare", "shop", "social_feed"});
    config["snapshot_policy"] = Json{{"base_delay_ms", 10000}, {"jitter_ms", 3000}, {"interval_ms", 30000}};
    config["clock_scale"] = 1000;
    std::ofstream(dir / "session.json") << dump_pretty(config);

    device::AgentConfig ac;
    ac.listen = {"127.0.0.1", 0};
    auto agent = device::run_sim_agent(ac);
    const int code = cli({"session", "run", "--config", dir / "session.json", "--agent",
                          agent->endpoint().to_string(), "--seed", "0", "--out", dir / "session"});
    agent->stop();
    agent->wait();
    if (code != 0) return {false, "session run exited " + std::to_string(code)};
    if (cli({"report", "show", dir / "session", "--json"}, &run.report_json) != 0) return {false, "report show failed"};
    run.persona = slurp(dir / "persona.json");
    run.trace = slurp(dir / "trace.jsonl");
    for (const auto& e : fs::directory_iterator(dir / "session/reports")) {
      run.report_files[e.path().filename().string()] = slurp(e.path());
    }
    runs.push_back(std::move(run));
  }
  Verdict v;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].persona != runs[0].persona) v = {false, "persona differs in run " + std::to_string(i + 1)};
    if (runs[i].trace != runs[0].trace) v = {false, "trace differs in run " + std::to_string(i + 1)};
    if (runs[i].report_json != runs[0].report_json || runs[i].report_files != runs[0].report_files) {
      v = {false, "reports differ in run " + std::to_string(i + 1)};
    }
  }
  if (v.pass) {
    v.detail = "3 runs identical: persona " + std::to_string(runs[0].persona.size()) + " B, trace " +
               std::to_string(runs[0].trace.size()) + " B, " + std::to_string(runs[0].report_files.size()) +
               " report files";
  }
  return v;
}

// 3. Trace invariants over 1000 randomized (profile, seed) trials.
Verdict trace_invariants() {
  Rng rng(3000);
  std::size_t violations = 0;
  std::size_t frames = 0;
  std::string first;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rp = support::random_persona(rng);
    sensor::SampleRates rates = sensor::default_sample_rates();
    for (auto& [c, hz] : rates) hz = std::min(hz, 0.5);
    const sensor::TraceWindow w{kNoonJune1 + rng.uniform_int(-24, 24) * 3600000, rng.uniform_int(10, 90) * 60000};
    const auto plan = sensor::synthesize_trace(rp.profile, w, rng.next(), rates, {"p", 1.0, rng.uniform_int(0, 5000)});
    frames += plan.frames.size();
    const auto problems = oracle::trace_violations(plan, rp.profile.max_speed_mps);
    if (!problems.empty() && first.empty()) first = "trial " + std::to_string(trial) + ": " + problems.front();
    violations += problems.size();
  }
  return {violations == 0, "1000 trials, " + std::to_string(frames) + " frames, " + std::to_string(violations) +
                               " violations" + (first.empty() ? "" : " (" + first + ")")};
}

std::set<std::string> error_rules(const persona::ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) {
    if (v.severity == persona::Severity::error) out.insert(v.rule_id);
  }
  return out;
}

std::set<std::string> warning_rules(const persona::ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) {
    if (v.severity == persona::Severity::warning) out.insert(v.rule_id);
  }
  return out;
}

// 4. Single-rule fixtures, a clean seed-0 persona and agreement with the rule oracle.
Verdict validator_oracle() {
  Verdict v;
  for (const std::string id : {"R1", "R2", "R3", "R4", "R5"}) {
    const auto p = fixtures::rule_fixture(id);
    const auto report = persona::validate_persona(p);
    if (report.ok || error_rules(report) != std::set<std::string>{id} ||
        oracle::check_rules(p).errors != std::set<std::string>{id}) {
      v.pass = false;
      v.detail += id + " fixture flags " + dump_line(persona::to_json(report)["violations"]) + "; ";
    }
  }
  const auto seed0 = persona::validate_persona(fixtures::make(0));
  if (!seed0.ok || !seed0.violations.empty()) {
    v.pass = false;
    v.detail += "seed-0 persona not clean; ";
  }
  Rng rng(4000);
  int disagreements = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    persona::Persona p =
        fixtures::make(static_cast<std::uint64_t>(trial % 50), trial % 7 == 0 ? R"({"shift":"night"})" : "{}");
    fixtures::mutate_persona(p, rng);
    const auto report = persona::validate_persona(p);
    const auto expected = oracle::check_rules(p);
    if (error_rules(report) != expected.errors || warning_rules(report) != expected.warnings ||
        report.ok != expected.errors.empty()) {
      ++disagreements;
    }
  }
  if (disagreements) v.pass = false;
  v.detail += "R1-R5 fixtures exact, seed 0 clean, oracle agreement " + std::to_string(trials - disagreements) + "/" +
              std::to_string(trials);
  return v;
}

// 5. Golden frames, decoder fuzzing and record truncation at every offset.
Verdict protocol_robustness() {
  Verdict v;
  std::size_t golden = 0;
  for (const auto& bytes : support::golden_frames()) {
    const auto f = device::decode_frame(bytes);
    if (device::encode_frame(f) == bytes && device::decode_frame(device::encode_frame(f)) == f) ++golden;
  }
  if (golden != support::golden_frames().size()) v.pass = false;

  const auto fuzz = support::fuzz_decoder(0x5EED, 10000);
  if (fuzz.crashes || fuzz.mismatches || fuzz.accepted + fuzz.rejected != 10000) v.pass = false;

  TempDir dir;
  const auto scenario = session::load_scenario(kSource + "/scenarios/night-weather.json");
  const auto outcome = session::run_scenario(scenario, dir / "record");
  const std::string text = slurp(dir / "record/record.jsonl");
  const auto& full = outcome.record.events;
  const std::size_t header_end = text.find('\n') + 1;
  std::size_t bad_cuts = 0;
  for (std::size_t cut = header_end; cut <= text.size(); ++cut) {
    const auto loaded = session::parse_record(std::string_view(text.data(), cut));
    // Complete lines after the header are exactly the events that must survive.
    const auto complete_lines = static_cast<std::size_t>(std::count(text.begin(), text.begin() + cut, '\n')) - 1;
    const std::size_t expected = std::min(full.size(), complete_lines);  // the end line is not an event
    bool ok = loaded.record.events.size() == expected;
    for (std::size_t i = 0; ok && i < loaded.record.events.size(); ++i) ok = loaded.record.events[i] == full[i];
    if (!ok) ++bad_cuts;
  }
  if (bad_cuts) v.pass = false;
  v.detail = std::to_string(golden) + "/" + std::to_string(support::golden_frames().size()) + " golden frames; fuzz " +
             std::to_string(fuzz.accepted) + " accepted, " + std::to_string(fuzz.rejected) + " rejected, " +
             std::to_string(fuzz.crashes) + " crashes, " + std::to_string(fuzz.mismatches) + " mismatches; " +
             std::to_string(text.size() - header_end + 1 - bad_cuts) + "/" +
             std::to_string(text.size() - header_end + 1) + " truncation offsets recover every complete event";
  return v;
}

// 6. Diff engine against brute-force comparison; diff(s, s) is no_change.
Verdict diff_oracle() {
  Rng rng(6000);
  int agree = 0;
  int self_clean = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto before = support::random_tree(rng);
    const auto after = support::perturb(before, rng);
    oracle::ChangeSet got;
    const auto changes = analysis::diff_trees(before, after);
    for (const auto& c : changes) got.insert({c.path, std::string(analysis::to_string(c.kind))});
    if (got == oracle::brute_force_changes(before, after) && got.size() == changes.size() &&
        changes.empty() == oracle::trees_equal(before, after)) {
      ++agree;
    }
    const device::UiSnapshot s{"shop", 1000, before, std::nullopt};
    const auto self = analysis::diff_snapshots(s, s, {});
    if (self.changes.empty() && self.verdict == analysis::Verdict::no_change) ++self_clean;
  }
  return {agree == 1000 && self_clean == 1000,
          std::to_string(agree) + "/1000 pairs match brute force, diff(s, s) = no_change " +
              std::to_string(self_clean) + "/1000"};
}

// 7. First snapshots within [base - jitter, base + jitter] of launch; jitter 0 is exact.
Verdict schedule_property() {
  session::SessionConfig c;
  c.app_suite = {"fitness", "weather", "rideshare", "shop", "social_feed"};
  c.trace = session::TraceScript{{kNoonJune1, 3600000}, {}};
  Rng rng(7000);
  std::size_t outside = 0;
  std::size_t inexact = 0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    c.seed = seed;
    const std::int64_t base = rng.uniform_int(1000, 60000);
    c.snapshot_policy = {base, rng.uniform_int(0, base - 1), rng.uniform_int(0, 600000)};
    for (const bool zero_jitter : {false, true}) {
      if (zero_jitter) c.snapshot_policy.jitter_ms = 0;
      const auto& p = c.snapshot_policy;
      const auto schedule = session::schedule_snapshots(c, 3600000);
      for (std::size_t i = 0; i < c.app_suite.size(); ++i) {
        const auto first = std::find_if(schedule.begin(), schedule.end(),
                                        [&](const auto& s) { return s.app_id == c.app_suite[i]; });
        ++checked;
        if (first == schedule.end()) {
          ++outside;
          continue;
        }
        const std::int64_t offset = first->t - session::launch_time(c, i);
        if (offset < p.base_delay_ms - p.jitter_ms || offset > p.base_delay_ms + p.jitter_ms) ++outside;
        if (zero_jitter && offset != p.base_delay_ms) ++inexact;
      }
    }
  }
  return {outside == 0 && inexact == 0, "1000 seeds x 5 apps x {jittered, zero jitter}: " + std::to_string(outside) +
                                            " outside the band, " + std::to_string(inexact) +
                                            " zero-jitter offsets differing from base (" + std::to_string(checked) +
                                            " checked)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 behavior reproduction", behavior_reproduction},
      {"2 determinism", determinism},
      {"3 trace invariants", trace_invariants},
      {"4 validator oracle", validator_oracle},
      {"5 protocol robustness", protocol_robustness},
      {"6 diff oracle equivalence", diff_oracle},
      {"7 schedule property", schedule_property},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << " [" << fmt_seconds(seconds) << "]\n"
              << std::flush;
  }
  return failed;
}
