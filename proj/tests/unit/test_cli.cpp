#include "sandbox/cli/cli.hpp"
#include "sandbox/device/agent.hpp"
#include "sandbox/persona/persona.hpp"

#include "oracles/rule_oracle.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace sandbox;
using sandbox::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result sh(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const std::string kSource = SANDBOX_SOURCE_DIR;

// Environment variable set for the lifetime of the guard.
struct EnvGuard {
  std::string name;
  EnvGuard(const char* n, const char* value) : name(n) { ::setenv(n, value, 1); }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(sh({}).code == cli::kExitUsage);
  CHECK(sh({"bogus"}).code == cli::kExitUsage);
  CHECK(sh({"persona"}).code == cli::kExitUsage);
  CHECK(sh({"persona", "gen", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(sh({"persona", "gen", "--template", "--llm"}).code == cli::kExitUsage);
  CHECK(sh({"persona", "validate", "/nonexistent/p.json"}).code == cli::kExitUsage);
  CHECK(sh({"persona", "gen", "--hints", "{\"age\":\"old\"}"}).code == cli::kExitUsage);
  CHECK(sh({"trace", "synth", "--persona", kSource + "/tests/golden/persona_seed0.json", "--duration-ms", "-5"}).code ==
        cli::kExitUsage);
  CHECK(sh({"--help"}).code == cli::kExitOk);
}

TEST_CASE("exit code mapping") {
  CHECK(cli::exit_code_for(Errc::invalid_window) == 1);
  CHECK(cli::exit_code_for(Errc::parse_error) == 1);
  CHECK(cli::exit_code_for(Errc::agent_unreachable) == 3);
  CHECK(cli::exit_code_for(Errc::io_error) == 3);
  CHECK(cli::exit_code_for(Errc::app_mismatch) == 3);
}

TEST_CASE("persona gen then validate closes") {
  TempDir dir;
  const auto gen = sh({"persona", "gen", "--template", "--seed", "0", "--out", dir / "p.json"});
  REQUIRE(gen.code == 0);
  CHECK(slurp(dir / "p.json") == slurp(kSource + "/tests/golden/persona_seed0.json"));
  const auto val = sh({"persona", "validate", dir / "p.json", "--json"});
  CHECK(val.code == 0);
  CHECK(Json::parse(val.out)["ok"] == true);
}

TEST_CASE("nightshift-morning fixture fails R1 only") {
  const std::string path = kSource + "/tests/fixtures/nightshift-morning.json";
  const auto r = sh({"persona", "validate", path});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.out.find("R1") != std::string::npos);
  const auto j = Json::parse(sh({"persona", "validate", path, "--json"}).out);
  REQUIRE(j["violations"].size() == 1);
  CHECK(j["violations"][0]["rule_id"] == "R1");
  const auto verdict = oracle::check_rules(persona::load_persona(path));
  CHECK(verdict.errors == std::set<std::string>{"R1"});
}

TEST_CASE("flags override environment") {
  EnvGuard seed("SANDBOX_SEED", "7");
  const auto from_env = Json::parse(sh({"persona", "gen", "--json"}).out);
  CHECK(from_env["id"].get<std::string>().size() > 2);
  CHECK(from_env["id"].get<std::string>().substr(from_env["id"].get<std::string>().size() - 2) == "-7");
  const auto from_flag = Json::parse(sh({"persona", "gen", "--seed", "0", "--json"}).out);
  CHECK(from_flag == Json::parse(slurp(kSource + "/tests/golden/persona_seed0.json")));
}

TEST_CASE("environment overrides the config file") {
  TempDir dir;
  EnvGuard scale("SANDBOX_CLOCK_SCALE", "0");
  // clock_scale 0 from the environment beats the file's 1000 and is rejected.
  const auto r = sh({"session", "run", "--config", kSource + "/scenarios/shop-gps-only.json", "--out", dir / "s"});
  CHECK(r.code == cli::kExitUsage);
  const auto ok = sh({"session", "run", "--config", kSource + "/scenarios/shop-gps-only.json", "--clock-scale", "1000",
                       "--out", dir / "s"});
  CHECK(ok.code == 0);
}

TEST_CASE("scenario run and report show") {
  TempDir dir;
  const auto run = sh({"session", "run", "--config", kSource + "/scenarios/night-weather.json", "--clock-scale", "1000",
                        "--out", dir / "night", "--json"});
  REQUIRE(run.code == 0);
  const Json summary = Json::parse(run.out);
  CHECK(summary["status"] == "completed");
  CHECK(summary["scenario"]["pass"] == true);

  const auto show = sh({"report", "show", dir / "night", "--app", "weather"});
  CHECK(show.code == 0);
  CHECK(show.out.find("\"day\" -> \"night\"") != std::string::npos);

  const auto a = sh({"report", "show", dir / "night", "--json"});
  const auto b = sh({"report", "show", dir / "night" + "/record.jsonl", "--json"});
  CHECK(a.out == b.out);
  const Json reports = Json::parse(a.out)["reports"];
  CHECK(!reports.empty());
}

TEST_CASE("unreachable agent exits 3") {
  TempDir dir;
  // Bind and release a port so nothing listens on it.
  std::uint16_t port;
  {
    auto l = net::Listener::bind({"127.0.0.1", 0});
    port = l.port();
  }
  Json config = Json::parse(slurp(kSource + "/scenarios/shop-gps-only.json"))["session"];
  spit(dir / "config.json", dump_pretty(config));
  const auto r = sh({"session", "run", "--config", dir / "config.json", "--agent", "127.0.0.1:" + std::to_string(port),
                      "--out", dir / "s"});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("agent-unreachable") != std::string::npos);
}

TEST_CASE("aborted session exits 3 and keeps the record") {
  TempDir dir;
  device::AgentConfig ac;
  ac.listen = {"127.0.0.1", 0};
  ac.fail_after_frames = 2;
  auto agent = device::run_sim_agent(ac);
  Json config = Json::parse(slurp(kSource + "/scenarios/shop-gps-only.json"))["session"];
  spit(dir / "config.json", dump_pretty(config));
  const auto r = sh({"session", "run", "--config", dir / "config.json", "--agent", agent->endpoint().to_string(),
                      "--out", dir / "s", "--json"});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(Json::parse(r.out)["status"] == "aborted");
  CHECK(sh({"report", "show", dir / "s"}).code == 0);
  agent->stop();
  agent->wait();
}

TEST_CASE("full pipeline is byte-identical across runs") {
  std::vector<std::string> personas, traces, reports;
  for (int run = 0; run < 3; ++run) {
    TempDir dir;
    REQUIRE(sh({"persona", "gen", "--template", "--seed", "0", "--out", dir / "p.json"}).code == 0);
    REQUIRE(sh({"trace", "synth", "--persona", dir / "p.json", "--seed", "0", "--start-ms", "1780315200000",
                 "--duration-ms", "60000", "--rates", R"({"step_counter":1,"gps_location":0.2,"ambient_light":1})", "--out",
                 dir / "t.jsonl"})
                .code == 0);
    Json config = Json::parse(slurp(kSource + "/scenarios/shop-gps-only.json"))["session"];
    config["trace"] = Json{{"path", "t.jsonl"}};
    config["app_suite"] = Json::array({"fitness", "weather", "rideshare", "shop", "social_feed"});
    config["targets"] = config["app_suite"];
    spit(dir / "config.json", dump_pretty(config));

    device::AgentConfig ac;
    ac.listen = {"127.0.0.1", 0};
    auto agent = device::run_sim_agent(ac);
    const auto r = sh({"session", "run", "--config", dir / "config.json", "--agent", agent->endpoint().to_string(),
                        "--seed", "0", "--out", dir / "s"});
    agent->stop();
    agent->wait();
    REQUIRE(r.code == 0);
    const auto show = sh({"report", "show", dir / "s", "--json"});
    REQUIRE(show.code == 0);
    personas.push_back(slurp(dir / "p.json"));
    traces.push_back(slurp(dir / "t.jsonl"));
    reports.push_back(show.out);
  }
  CHECK(personas[0] == personas[1]);
  CHECK(personas[1] == personas[2]);
  CHECK(traces[0] == traces[1]);
  CHECK(traces[1] == traces[2]);
  CHECK(reports[0] == reports[1]);
  CHECK(reports[1] == reports[2]);
  CHECK(Json::parse(reports[0])["reports"].size() >= 5);
}
