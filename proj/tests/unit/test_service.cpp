#include "sandbox/device/agent.hpp"
#include "sandbox/service/server.hpp"
#include "sandbox/session/record.hpp"

#include "support/temp_dir.hpp"

#include <doctest.h>
#include <httplib.h>

#include <chrono>
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

struct Fixture {
  TempDir store;
  service::Server server{[&] {
    service::ServiceConfig c;
    c.listen = {"127.0.0.1", 0};
    c.store_dir = store.path.string();
    return c;
  }()};
  std::unique_ptr<httplib::Client> client;

  Fixture() {
    server.start();
    client = std::make_unique<httplib::Client>("127.0.0.1", server.port());
    client->set_read_timeout(10, 0);
  }

  std::pair<int, Json> get(const std::string& path) {
    auto r = client->Get(path);
    REQUIRE(r);
    return {r->status, Json::parse(r->body)};
  }
  std::pair<int, Json> post(const std::string& path, const std::string& body) {
    auto r = client->Post(path, body, "application/json");
    REQUIRE(r);
    return {r->status, Json::parse(r->body)};
  }

  Json wait_finished(const std::string& id) {
    for (int i = 0; i < 400; ++i) {
      const auto [status, j] = get("/api/sessions/" + id);
      if (status == 200 && !j["end"].is_null()) return j;
      std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
    FAIL("session " << id << " did not finish");
    return {};
  }
};

Json scenario(const std::string& name) { return Json::parse(slurp(kSource + "/scenarios/" + name + ".json")); }

// A bare session config against `agent`, paced so it lasts about `seconds`.
Json slow_config(const net::Endpoint& agent, double seconds) {
  Json c = scenario("shop-gps-only")["session"];
  c["agent"] = agent.to_string();
  c["clock_scale"] = 60.0 / seconds;
  return c;
}

std::unique_ptr<device::SimAgent> local_agent() {
  device::AgentConfig ac;
  ac.listen = {"127.0.0.1", 0};
  return device::run_sim_agent(ac);
}

struct SseEvent {
  std::uint64_t id;
  Json data;
};

// Reads the event stream, stopping after `limit` events (0: until the end).
std::vector<SseEvent> read_events(httplib::Client& client, const std::string& path, std::size_t limit,
                                  const httplib::Headers& headers = {}) {
  std::vector<SseEvent> events;
  std::string buffer;
  client.Get(path, headers, [&](const char* data, std::size_t n) {
    buffer.append(data, n);
    for (std::size_t cut; (cut = buffer.find("\n\n")) != std::string::npos;) {
      const std::string block = buffer.substr(0, cut);
      buffer.erase(0, cut + 2);
      if (block.rfind("id: ", 0) != 0) continue;
      const auto nl = block.find('\n');
      SseEvent e{std::stoull(block.substr(4, nl - 4)), Json::parse(block.substr(nl + 7))};
      events.push_back(e);
      if (limit && events.size() >= limit) return false;
    }
    return true;
  });
  return events;
}

}  // namespace

TEST_CASE("personas: generate, list, parity with the store") {
  Fixture f;
  const auto [status, body] = f.post("/api/personas", R"({"seed":0})");
  REQUIRE(status == 201);
  CHECK(body == Json::parse(slurp(kSource + "/tests/golden/persona_seed0.json")));
  CHECK(Json::parse(slurp(f.store / ("personas/" + body["id"].get<std::string>() + ".json"))) == body);
  const auto [list_status, list] = f.get("/api/personas");
  CHECK(list_status == 200);
  REQUIRE(list.size() == 1);
  CHECK(list[0] == body);
}

TEST_CASE("personas: bad requests are 422 with a reason") {
  Fixture f;
  auto [s1, b1] = f.post("/api/personas", "not json");
  CHECK(s1 == 422);
  CHECK(b1["error"]["code"] == "invalid-request");
  auto [s2, b2] = f.post("/api/personas", R"({"seed":0,"hints":{"age":200}})");
  CHECK(s2 == 422);
  REQUIRE(b2["error"].contains("violations"));
  CHECK(b2["error"]["violations"][0]["rule_id"] == "R5");
  auto [s3, b3] = f.post("/api/personas", R"({"seed":0,"hints":{"shift":"sometimes"}})");
  CHECK(s3 == 422);
}

TEST_CASE("sessions: scenario run, record and reports match the files") {
  Fixture f;
  const auto [status, started] = f.post("/api/sessions", dump_line(scenario("night-weather")));
  REQUIRE(status == 202);
  const std::string id = started["session_id"];
  CHECK(started["links"]["events"] == "/api/sessions/" + id + "/events");
  const Json record = f.wait_finished(id);
  CHECK(record["end"]["status"] == "completed");

  const auto loaded = session::load_record(f.store / ("sessions/" + id));
  CHECK(record == service::record_to_json(loaded.record));

  const auto [rs, reports] = f.get("/api/sessions/" + id + "/reports");
  CHECK(rs == 200);
  REQUIRE(!reports["reports"].empty());
  for (const auto& r : reports["reports"]) {
    const Json file = Json::parse(slurp(f.store / ("sessions/" + id + "/" + r["ref"].get<std::string>())));
    CHECK(r["report"] == file);
  }
  const auto [ls, list] = f.get("/api/sessions");
  CHECK(ls == 200);
  REQUIRE(list.size() == 1);
  CHECK(list[0]["status"] == "completed");

  // The same config again gets a fresh id.
  const auto [s2, again] = f.post("/api/sessions", dump_line(scenario("night-weather")));
  CHECK(s2 == 202);
  CHECK(again["session_id"] == id + "-2");
  f.wait_finished(again["session_id"]);
}

TEST_CASE("sessions: unknown ids and invalid configs") {
  Fixture f;
  CHECK(f.get("/api/sessions/nope").first == 404);
  CHECK(f.get("/api/sessions/nope/reports").first == 404);
  CHECK(f.post("/api/sessions/nope/abort", "").first == 404);
  CHECK(f.post("/api/sessions", R"({"trace":{}})").first == 422);
  Json bad = scenario("shop-gps-only")["session"];
  bad["snapshot_policy"]["base_delay_ms"] = 90000;
  const auto [s, body] = f.post("/api/sessions", dump_line(bad));
  CHECK(s == 422);
  CHECK(body["error"]["code"] == "window-too-short");
}

TEST_CASE("sessions: one running session per agent, abort") {
  Fixture f;
  auto agent = local_agent();
  const auto [s1, first] = f.post("/api/sessions", dump_line(slow_config(agent->endpoint(), 6.0)));
  REQUIRE(s1 == 202);
  const std::string id = first["session_id"];

  Json other = slow_config(agent->endpoint(), 6.0);
  other["seed"] = 99;
  const auto [s2, conflict] = f.post("/api/sessions", dump_line(other));
  CHECK(s2 == 409);
  CHECK(conflict["error"]["code"] == "conflict");

  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  CHECK(f.post("/api/sessions/" + id + "/abort", "").first == 202);
  const Json record = f.wait_finished(id);
  CHECK(record["end"]["status"] == "aborted");
  CHECK(record["events"].back()["type"] == "error");
  CHECK(f.post("/api/sessions/" + id + "/abort", "").first == 409);

  // The agent is free again.
  Json fast = slow_config(agent->endpoint(), 0.06);
  fast["seed"] = 99;
  const auto [s3, third] = f.post("/api/sessions", dump_line(fast));
  CHECK(s3 == 202);
  CHECK(f.wait_finished(third["session_id"])["end"]["status"] == "completed");
  agent->stop();
  agent->wait();
}

TEST_CASE("events: reconnecting resumes with no gaps or duplicates") {
  Fixture f;
  auto agent = local_agent();
  const auto [status, started] = f.post("/api/sessions", dump_line(slow_config(agent->endpoint(), 1.5)));
  REQUIRE(status == 202);
  const std::string id = started["session_id"];
  const std::string path = "/api/sessions/" + id + "/events";

  httplib::Client c1("127.0.0.1", f.server.port());
  auto part1 = read_events(c1, path, 3);
  REQUIRE(part1.size() == 3);
  httplib::Client c2("127.0.0.1", f.server.port());
  auto part2 = read_events(c2, path, 0, {{"Last-Event-ID", std::to_string(part1.back().id)}});

  const Json record = f.wait_finished(id);
  std::vector<SseEvent> all = part1;
  all.insert(all.end(), part2.begin(), part2.end());
  REQUIRE(all.size() == record["events"].size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].id == i);
    CHECK(all[i].data == record["events"][i]);
  }

  // Replay of a finished session by cursor.
  httplib::Client c3("127.0.0.1", f.server.port());
  const auto tail = read_events(c3, path + "?cursor=2", 0);
  REQUIRE(tail.size() == all.size() - 2);
  CHECK(tail.front().id == 2);
  CHECK(tail.back().data == all.back().data);
  agent->stop();
  agent->wait();
}

TEST_CASE("bind failure is reported") {
  Fixture f;
  service::ServiceConfig c;
  c.listen = {"127.0.0.1", f.server.port()};
  TempDir store;
  c.store_dir = store.path.string();
  service::Server clash(c);
  CHECK_THROWS_AS(clash.start(), Error);
}
