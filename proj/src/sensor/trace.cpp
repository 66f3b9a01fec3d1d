#include "sandbox/sensor/trace.hpp"

#include "sandbox/common/error.hpp"

#include <fstream>
#include <sstream>

namespace sandbox::sensor {

Json to_json(const SampleRates& rates) {
  Json j = Json::object();
  for (const auto& [channel, hz] : rates) j[std::string(to_string(channel))] = hz;
  return j;
}

SampleRates sample_rates_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "sample_rates must be an object");
  SampleRates rates;
  for (const auto& [key, value] : j.items()) {
    const auto channel = parse_channel(key);
    if (!channel) throw Error(Errc::unsupported_channel, "unknown channel '" + key + "'");
    if (!value.is_number()) throw Error(Errc::parse_error, "rate for " + key + " must be a number");
    rates[*channel] = value.get<double>();
  }
  return rates;
}

Json trace_header(const TracePlan& plan) {
  Json h = Json::object();
  h["schema"] = 1;
  h["kind"] = "trace";
  h["persona_id"] = plan.persona_id;
  h["seed"] = plan.seed;
  h["window"] = {{"start_ms", plan.window.start_ms}, {"duration_ms", plan.window.duration_ms}};
  h["clock_scale"] = plan.clock_scale;
  h["initial_steps"] = plan.initial_steps;
  h["sample_rates"] = to_json(plan.sample_rates);
  h["frame_count"] = plan.frames.size();
  return h;
}

std::string serialize_trace(const TracePlan& plan) {
  std::string out = dump_line(trace_header(plan));
  out += '\n';
  for (const auto& f : plan.frames) {
    out += dump_line(to_json(f));
    out += '\n';
  }
  return out;
}

void save_trace(const TracePlan& plan, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << serialize_trace(plan);
  if (!out.flush()) throw Error(Errc::io_error, "write failed for " + path);
}

namespace {

Json parse_line(std::string_view line, std::size_t number) {
  try {
    return Json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, "line " + std::to_string(number) + ": " + e.what());
  }
}

template <typename T>
T field(const Json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw Error(Errc::parse_error, "line " + std::to_string(line) + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ": bad '" + key + "'");
  }
}

}  // namespace

LoadedTrace parse_trace(std::string_view text) {
  LoadedTrace out;
  std::size_t pos = 0;
  std::size_t number = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string_view::npos;
    if (!terminated) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    Json j;
    try {
      j = parse_line(line, number);
    } catch (const Error&) {
      // A cut-off final line is a short trace, not a corrupt one.
      if (!terminated && have_header) break;
      throw;
    }
    if (!have_header) {
      if (!j.is_object() || j.value("kind", "") != "trace") {
        throw Error(Errc::parse_error, "line " + std::to_string(number) + ": missing trace header");
      }
      if (field<int>(j, "schema", number) != 1) throw Error(Errc::parse_error, "unsupported trace schema");
      TracePlan& p = out.plan;
      p.persona_id = field<std::string>(j, "persona_id", number);
      p.seed = field<std::uint64_t>(j, "seed", number);
      const Json w = field<Json>(j, "window", number);
      p.window.start_ms = field<std::int64_t>(w, "start_ms", number);
      p.window.duration_ms = field<std::int64_t>(w, "duration_ms", number);
      p.clock_scale = field<double>(j, "clock_scale", number);
      p.initial_steps = j.value("initial_steps", std::int64_t{0});
      try {
        p.sample_rates = sample_rates_from_json(field<Json>(j, "sample_rates", number));
      } catch (const Error& e) {
        throw Error(Errc::parse_error, "line " + std::to_string(number) + ": " + e.what());
      }
      out.declared_frames = field<std::int64_t>(j, "frame_count", number);
      have_header = true;
      continue;
    }
    SensorFrame f;
    try {
      f = frame_from_json(j);
    } catch (const Error& e) {
      throw Error(Errc::parse_error, "line " + std::to_string(number) + ": " + e.what());
    }
    if (const std::string why = check_frame(f); !why.empty()) {
      throw Error(Errc::parse_error, "line " + std::to_string(number) + ": " + why);
    }
    if (!out.plan.frames.empty() && canonical_less(f, out.plan.frames.back())) {
      throw Error(Errc::parse_error, "line " + std::to_string(number) + ": frames out of order");
    }
    out.plan.frames.push_back(std::move(f));
  }
  if (!have_header) throw Error(Errc::parse_error, "empty trace (missing header)");
  const auto actual = static_cast<std::int64_t>(out.plan.frames.size());
  if (actual > out.declared_frames) throw Error(Errc::parse_error, "more frames than frame_count");
  out.exhausted_early = actual < out.declared_frames;
  return out;
}

LoadedTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

}  // namespace sandbox::sensor
