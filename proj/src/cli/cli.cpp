#include "sandbox/cli/cli.hpp"

#include "sandbox/common/json.hpp"
#include "sandbox/common/llm_client.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/persona/generate.hpp"
#include "sandbox/persona/validate.hpp"
#include "sandbox/sensor/trace.hpp"
#include "sandbox/service/server.hpp"
#include "sandbox/session/runner.hpp"
#include "sandbox/session/scenario.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <set>
#include <thread>

namespace sandbox::cli {
namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

void wait_for_signal() {
  g_interrupted = false;
  auto old_int = std::signal(SIGINT, on_signal);
  auto old_term = std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw Error(Errc::io_error, "cannot write " + path);
}

// Inline JSON or @file.
Json json_arg(const std::string& text, const char* what) {
  const std::string body = !text.empty() && text.front() == '@' ? read_file(text.substr(1)) : text;
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::invalid_request, std::string(what) + " is not valid JSON");
  return j;
}

Json read_json_file(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::parse_error, path + ": not valid JSON");
  return j;
}

void print_violations(std::ostream& os, const persona::ValidationReport& r) {
  for (const auto& v : r.violations) {
    os << (v.severity == persona::Severity::error ? "error" : "warning") << " " << v.rule_id << ": " << v.message
       << "\n";
  }
}

struct Common {
  bool json = false;
};

// ---- persona ---------------------------------------------------------------

struct PersonaGenArgs {
  bool llm = false;
  std::uint64_t seed = 0;
  std::string hints;
  std::string out_path;
};

int persona_gen(const PersonaGenArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  persona::PersonaRequest request;
  request.seed = a.seed;
  request.generator = a.llm ? persona::GeneratorKind::llm : persona::GeneratorKind::template_based;
  if (!a.hints.empty()) request.hints = persona::parse_hints(json_arg(a.hints, "--hints"));
  std::unique_ptr<LlmClient> llm;
  if (a.llm) {
    llm = make_llm_client_from_env();
    if (!llm) throw Error(Errc::invalid_request, "--llm needs SANDBOX_LLM_ENDPOINT");
  }
  persona::Persona p;
  try {
    p = persona::generate_persona(request, llm.get());
  } catch (const persona::PersonaRejected& e) {
    err << "persona rejected: " << e.what() << "\n";
    print_violations(err, e.report());
    return kExitValidation;
  }
  if (!a.out_path.empty()) write_file(a.out_path, persona::serialize(p));
  if (c.json || a.out_path.empty()) {
    out << dump_pretty(persona::to_json(p)) << "\n";
  } else {
    out << "persona " << p.id << " (" << p.name << ", " << p.age << ", " << p.occupation << ", "
        << p.location.name << ") written to " << a.out_path << "\n";
  }
  return kExitOk;
}

int persona_validate(const std::string& path, const Common& c, std::ostream& out) {
  const persona::Persona p = persona::load_persona(path);
  const persona::ValidationReport r = persona::validate_persona(p);
  if (c.json) {
    out << dump_pretty(persona::to_json(r)) << "\n";
  } else {
    out << path << ": " << (r.ok ? "ok" : "invalid") << "\n";
    print_violations(out, r);
  }
  return r.ok ? kExitOk : kExitValidation;
}

// ---- trace -----------------------------------------------------------------

struct TraceArgs {
  std::string persona_path;
  std::int64_t start_ms = 1780272000000;
  std::int64_t duration_ms = 3600000;
  std::uint64_t seed = 0;
  std::string rates;
  std::int64_t initial_steps = 0;
  double clock_scale = 1.0;
  std::string out_path;
};

int trace_synth(const TraceArgs& a, const Common& c, std::ostream& out) {
  const persona::Persona p = persona::load_persona(a.persona_path);
  const sensor::SampleRates rates =
      a.rates.empty() ? sensor::default_sample_rates() : sensor::sample_rates_from_json(json_arg(a.rates, "--rates"));
  sensor::SynthOptions options;
  options.persona_id = p.id;
  options.clock_scale = a.clock_scale;
  options.initial_steps = a.initial_steps;
  const sensor::TracePlan plan =
      sensor::synthesize_trace(p.sensor_profile, {a.start_ms, a.duration_ms}, a.seed, rates, options);
  if (a.out_path.empty()) {
    out << sensor::serialize_trace(plan);
    return kExitOk;
  }
  sensor::save_trace(plan, a.out_path);
  if (c.json) {
    Json j = sensor::trace_header(plan);
    j["path"] = a.out_path;
    out << dump_pretty(j) << "\n";
  } else {
    out << plan.frames.size() << " frames for " << p.id << " written to " << a.out_path << "\n";
  }
  return kExitOk;
}

// ---- agent -----------------------------------------------------------------

struct AgentArgs {
  std::string config_path;
  std::string listen;
  std::uint64_t seed = 0;
  std::vector<std::string> apps;
};

int agent_run(const AgentArgs& a, CLI::App& cmd, std::ostream& out) {
  device::AgentConfig config;
  if (!a.config_path.empty()) config = device::load_agent_config(a.config_path);
  if (cmd.count("--listen")) config.listen = net::parse_endpoint(a.listen);
  if (cmd.count("--seed")) config.seed = a.seed;
  if (cmd.count("--apps")) config.apps = a.apps;
  auto agent = device::run_sim_agent(config);
  out << "agent listening on " << agent->endpoint().to_string() << "\n" << std::flush;
  wait_for_signal();
  agent->stop();
  agent->wait();
  return kExitOk;
}

// ---- session ---------------------------------------------------------------

struct SessionArgs {
  std::string config_path;
  std::string agent;
  double clock_scale = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string store;
};

Json session_summary(const session::SessionRecord& r, const std::string& dir) {
  Json j;
  j["session_id"] = r.session_id;
  j["status"] = session::to_string(r.status);
  j["record"] = dir;
  j["events"] = r.events.size();
  Json finals = Json::array();
  std::set<std::string> seen;
  for (const auto& e : r.events) {
    if (e.kind == session::EventKind::error) j["error"] = e.data;
    if (e.kind != session::EventKind::diff_emitted || e.data.value("pair", "") != "baseline_latest") continue;
    const auto it = r.reports.find(e.data.value("ref", ""));
    if (it == r.reports.end()) continue;
    finals.push_back(Json{{"app_id", it->second.app_id},
                          {"verdict", analysis::to_string(it->second.verdict)},
                          {"narrative", it->second.narrative},
                          {"ref", it->first}});
  }
  j["final_reports"] = finals;
  return j;
}

int session_run(const SessionArgs& a, CLI::App& cmd, const Common& c, std::ostream& out, std::ostream& err) {
  const Json doc = read_json_file(a.config_path);
  const std::string base_dir = fs::path(a.config_path).parent_path().string();
  std::optional<session::Scenario> scenario;
  session::SessionConfig config;
  if (session::is_scenario(doc)) {
    scenario = session::scenario_from_json(doc, base_dir);
    config = scenario->session;
  } else {
    config = session::session_config_from_json(doc, base_dir);
  }
  if (cmd.count("--clock-scale")) config.clock_scale = a.clock_scale;
  if (cmd.count("--seed")) config.seed = a.seed;
  const bool external_agent = !scenario || cmd.count("--agent") > 0;
  if (cmd.count("--agent")) config.agent = net::parse_endpoint(a.agent);
  session::check_config(config);

  const std::string id = session::effective_session_id(config);
  std::string dir = a.out_dir;
  if (dir.empty()) dir = (fs::path(a.store.empty() ? "sandbox-store" : a.store) / "sessions" / id).string();

  std::unique_ptr<device::SimAgent> agent;
  if (!external_agent) {
    agent = device::run_sim_agent(scenario->agent);
    config.agent = agent->endpoint();
  }
  const auto t0 = std::chrono::steady_clock::now();
  session::RunOptions options;
  options.record_dir = dir;
  session::ScenarioOutcome outcome;
  outcome.record = session::run_session(config, options);
  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (agent) {
    agent->stop();
    agent->wait();
  }

  Json summary = session_summary(outcome.record, dir);
  if (scenario) {
    session::evaluate_scenario(*scenario, outcome);
    summary["scenario"] = Json{{"name", scenario->name}, {"pass", outcome.pass}, {"detail", outcome.detail}};
  }
  if (c.json) {
    out << dump_pretty(summary) << "\n";
  } else {
    out << "session " << outcome.record.session_id << " " << summary["status"].get<std::string>() << " ("
        << outcome.record.events.size() << " events) record in " << dir << "\n";
    for (const auto& f : summary["final_reports"]) {
      out << "  " << f["app_id"].get<std::string>() << ": " << f["verdict"].get<std::string>() << " - "
          << f["narrative"].get<std::string>() << "\n";
    }
    if (summary.contains("error")) out << "  error: " << dump_line(summary["error"]) << "\n";
    if (scenario) {
      out << "scenario " << scenario->name << ": " << (outcome.pass ? "pass" : "FAIL " + outcome.detail) << "\n";
    }
  }
  if (outcome.record.status != session::SessionStatus::completed) {
    err << "session " << session::to_string(outcome.record.status) << "\n";
    return kExitRuntime;
  }
  if (scenario && !outcome.pass) return kExitValidation;
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

int report_show(const std::string& path, const std::string& app, const Common& c, std::ostream& out,
                std::ostream& err) {
  const session::LoadedRecord loaded = session::load_record(path);
  const auto& r = loaded.record;
  if (!loaded.diagnostic.empty()) err << "warning: " << loaded.diagnostic << "\n";
  Json reports = Json::array();
  for (const auto& e : r.events) {
    if (e.kind != session::EventKind::diff_emitted) continue;
    const std::string ref = e.data.value("ref", "");
    const auto it = r.reports.find(ref);
    if (it == r.reports.end() || (!app.empty() && it->second.app_id != app)) continue;
    reports.push_back(Json{{"ref", ref}, {"pair", e.data.value("pair", "")}, {"report", analysis::to_json(it->second)}});
  }
  if (c.json) {
    Json j;
    j["session_id"] = r.session_id;
    j["status"] = session::to_string(r.status);
    j["reports"] = reports;
    out << dump_pretty(j) << "\n";
    return kExitOk;
  }
  out << "session " << r.session_id << " (" << session::to_string(r.status) << ")\n";
  for (const auto& entry : reports) {
    const analysis::DiffReport d = analysis::diff_report_from_json(entry["report"]);
    out << "\n" << d.app_id << " " << entry["pair"].get<std::string>() << " " << d.before_ref << " -> "
        << d.after_ref << ": " << analysis::to_string(d.verdict) << "\n";
    for (const auto& ch : d.changes) {
      out << "  " << analysis::to_string(ch.kind) << " " << ch.path;
      if (ch.before) out << " \"" << *ch.before << "\"";
      if (ch.before && ch.after) out << " ->";
      if (ch.after) out << " \"" << *ch.after << "\"";
      if (ch.moved) out << " (moved)";
      out << "\n";
    }
    if (!d.attribution.empty()) {
      out << "  spoofed:";
      for (const auto& ch : d.attribution) out << " " << sensor::to_string(ch);
      out << "\n";
    }
  }
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------

int serve(const std::string& listen, const std::string& store, std::ostream& out) {
  service::ServiceConfig config;
  config.listen = net::parse_endpoint(listen);
  config.store_dir = store;
  auto llm = make_llm_client_from_env();
  config.llm = llm.get();
  service::Server server(config);
  server.start();
  out << "serving on http://" << config.listen.host << ":" << server.port() << " (store " << store << ")\n"
      << std::flush;
  wait_for_signal();
  server.stop();
  return kExitOk;
}

}  // namespace

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_request:
    case Errc::invalid_lifestyle:
    case Errc::invalid_window:
    case Errc::invalid_rate:
    case Errc::unsupported_channel:
    case Errc::speed_violates_profile:
    case Errc::window_too_short:
    case Errc::parse_error:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persona-driven sensor spoofing sandbox", "sandbox"};
  app.require_subcommand(1);
  Common common;

  auto* persona_cmd = app.add_subcommand("persona", "generate and validate personas")->require_subcommand(1);
  PersonaGenArgs gen;
  auto* gen_cmd = persona_cmd->add_subcommand("gen", "generate a persona");
  auto* tmpl = gen_cmd->add_flag("--template", "built-in deterministic generator (default)");
  gen_cmd->add_flag("--llm", gen.llm, "LLM generator configured by SANDBOX_LLM_*")->excludes(tmpl);
  gen_cmd->add_option("--seed", gen.seed, "generation seed")->envname("SANDBOX_SEED");
  gen_cmd->add_option("--hints", gen.hints, "hints as JSON or @file");
  gen_cmd->add_option("--out", gen.out_path, "persona file to write");
  gen_cmd->add_flag("--json", common.json, "print the persona JSON");

  std::string validate_path;
  auto* val_cmd = persona_cmd->add_subcommand("validate", "check a persona file against R1-R6");
  val_cmd->add_option("file", validate_path, "persona file")->check(CLI::ExistingFile)->required();
  val_cmd->add_flag("--json", common.json, "print the validation report as JSON");

  auto* trace_cmd = app.add_subcommand("trace", "sensor traces")->require_subcommand(1);
  TraceArgs trace;
  auto* synth_cmd = trace_cmd->add_subcommand("synth", "synthesize a trace for a persona");
  synth_cmd->add_option("--persona", trace.persona_path, "persona file")->check(CLI::ExistingFile)->required();
  synth_cmd->add_option("--start-ms", trace.start_ms, "window start, epoch ms");
  synth_cmd->add_option("--duration-ms", trace.duration_ms, "window length, ms");
  synth_cmd->add_option("--seed", trace.seed, "trace seed")->envname("SANDBOX_SEED");
  synth_cmd->add_option("--rates", trace.rates, "channel rates in Hz as JSON or @file");
  synth_cmd->add_option("--initial-steps", trace.initial_steps, "step counter at t = 0");
  synth_cmd->add_option("--clock-scale", trace.clock_scale, "replay speed recorded in the header")
      ->envname("SANDBOX_CLOCK_SCALE");
  synth_cmd->add_option("--out", trace.out_path, "trace file to write (stdout if omitted)");
  synth_cmd->add_flag("--json", common.json, "print the trace header as JSON");

  auto* agent_cmd = app.add_subcommand("agent", "simulated device agent")->require_subcommand(1);
  AgentArgs agent;
  auto* agent_run_cmd = agent_cmd->add_subcommand("run", "serve mock apps until interrupted");
  agent_run_cmd->add_option("--config", agent.config_path, "agent config file")->check(CLI::ExistingFile);
  agent_run_cmd->add_option("--listen", agent.listen, "host:port")->envname("SANDBOX_AGENT");
  agent_run_cmd->add_option("--seed", agent.seed, "device seed")->envname("SANDBOX_SEED");
  agent_run_cmd->add_option("--apps", agent.apps, "installed apps")->delimiter(',');

  auto* session_cmd = app.add_subcommand("session", "orchestrated sessions")->require_subcommand(1);
  SessionArgs sess;
  auto* session_run_cmd = session_cmd->add_subcommand("run", "run a session config or scenario");
  session_run_cmd->add_option("--config", sess.config_path, "session config or scenario file")->check(CLI::ExistingFile)->required();
  session_run_cmd->add_option("--agent", sess.agent, "agent host:port (scenarios start their own)")
      ->envname("SANDBOX_AGENT");
  session_run_cmd->add_option("--clock-scale", sess.clock_scale, "session seconds per wall second")
      ->envname("SANDBOX_CLOCK_SCALE");
  session_run_cmd->add_option("--seed", sess.seed, "snapshot schedule seed")->envname("SANDBOX_SEED");
  session_run_cmd->add_option("--out", sess.out_dir, "record directory");
  session_run_cmd->add_option("--store", sess.store, "store root when --out is omitted")->envname("SANDBOX_STORE");
  session_run_cmd->add_flag("--json", common.json, "print the outcome as JSON");

  auto* report_cmd = app.add_subcommand("report", "diff reports")->require_subcommand(1);
  std::string report_path;
  std::string report_app;
  auto* show_cmd = report_cmd->add_subcommand("show", "print the diff reports of a session");
  show_cmd->add_option("record", report_path, "session directory or record.jsonl")->check(CLI::ExistingPath)->required();
  show_cmd->add_option("--app", report_app, "only this app");
  show_cmd->add_flag("--json", common.json, "print reports as JSON");

  std::string listen = "127.0.0.1:8080";
  std::string store = "sandbox-store";
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the console");
  serve_cmd->add_option("--listen", listen, "host:port")->envname("SANDBOX_LISTEN");
  serve_cmd->add_option("--store", store, "store root")->envname("SANDBOX_STORE");

  // Every subcommand takes --seed; report and serve have nothing seeded but accept it.
  std::uint64_t unused_seed = 0;
  show_cmd->add_option("--seed", unused_seed, "ignored")->envname("SANDBOX_SEED")->group("");
  serve_cmd->add_option("--seed", unused_seed, "ignored")->envname("SANDBOX_SEED")->group("");
  val_cmd->add_option("--seed", unused_seed, "ignored")->envname("SANDBOX_SEED")->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return persona_gen(gen, common, out, err);
    if (*val_cmd) return persona_validate(validate_path, common, out);
    if (*synth_cmd) return trace_synth(trace, common, out);
    if (*agent_run_cmd) return agent_run(agent, *agent_run_cmd, out);
    if (*session_run_cmd) return session_run(sess, *session_run_cmd, common, out, err);
    if (*show_cmd) return report_show(report_path, report_app, common, out, err);
    if (*serve_cmd) return serve(listen, store, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace sandbox::cli
