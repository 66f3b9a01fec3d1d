#include "sandbox/analysis/summary.hpp"

#include "sandbox/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sandbox::analysis {
namespace {

using device::ElementKind;
using device::UiElement;

void walk(const std::vector<UiElement>& siblings, const std::string& prefix, int depth,
          std::vector<SummaryElement>& out) {
  std::map<ElementKind, std::size_t> ordinals;
  for (const auto& e : siblings) {
    const std::string path = prefix + "/" + device::path_segment(e.kind, ordinals[e.kind]++);
    out.push_back({path, e.kind, e.text, kind_salience(e.kind) * std::pow(kDepthDiscount, depth)});
    walk(e.children, path, depth + 1, out);
  }
}

std::string narrate(const std::vector<SummaryElement>& elements) {
  if (elements.empty()) return "no visible content";
  const SummaryElement& top = elements.front();
  std::string s = std::to_string(elements.size()) + (elements.size() == 1 ? " visible element" : " visible elements");
  s += "; most salient is the " + std::string(device::to_string(top.kind));
  if (!top.text.empty()) s += " \"" + top.text + "\"";
  return s;
}

double clamp01(double v) { return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0; }

}  // namespace

std::string_view to_string(SummarizerId id) {
  return id == SummarizerId::structural_stub ? "structural_stub" : "vision_llm";
}

std::string snapshot_ref(const device::UiSnapshot& s) { return s.app_id + "@" + std::to_string(s.t); }

double kind_salience(ElementKind kind) {
  switch (kind) {
    case ElementKind::notification: return 1.0;
    case ElementKind::badge: return 0.9;
    case ElementKind::message: return 0.8;
    case ElementKind::banner: return 0.7;
    case ElementKind::price: return 0.6;
    case ElementKind::mode_flag: return 0.5;
    case ElementKind::card: return 0.4;
  }
  return 0.0;
}

UiSummary StructuralStub::summarize(const device::UiSnapshot& s) {
  UiSummary out;
  out.snapshot_ref = snapshot_ref(s);
  out.summarizer = SummarizerId::structural_stub;
  walk(s.ui_state, "", 0, out.elements);
  std::stable_sort(out.elements.begin(), out.elements.end(),
                   [](const SummaryElement& a, const SummaryElement& b) { return a.salience > b.salience; });
  out.narrative = narrate(out.elements);
  return out;
}

LlmRequest build_vision_prompt(const device::UiSnapshot& s) {
  LlmRequest r;
  r.system =
      "You describe mobile app screenshots for a privacy audit. Reply with one JSON object and nothing else: "
      "{\"elements\": [{\"kind\": K, \"text\": T, \"salience\": S}], \"narrative\": N}. "
      "K is one of banner, card, notification, badge, price, mode_flag, message. "
      "S is a number in [0, 1]; rank notifications above badges above banners above cards. "
      "N is one or two sentences on what the screen shows.";
  r.user = "App: " + s.app_id + ". List the visible content: banners, product cards, notifications, badges, prices, "
           "day/night indicators and service messages.";
  r.image_ref = s.raw_image_ref;
  return r;
}

UiSummary coerce_vision_reply(const std::string& reply, const device::UiSnapshot& s) {
  const Json j = Json::parse(outermost_object(reply), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::coercion_failure, "reply is not a JSON object");
  const auto elements = j.find("elements");
  if (elements == j.end() || !elements->is_array()) throw Error(Errc::coercion_failure, "missing 'elements' array");
  UiSummary out;
  out.snapshot_ref = snapshot_ref(s);
  out.summarizer = SummarizerId::vision_llm;
  for (const auto& e : *elements) {
    if (!e.is_object()) throw Error(Errc::coercion_failure, "element is not an object");
    const auto kind = e.contains("kind") && e["kind"].is_string()
                          ? device::parse_element_kind(e["kind"].get<std::string>())
                          : std::nullopt;
    if (!kind) throw Error(Errc::coercion_failure, "element kind missing or unknown");
    SummaryElement el;
    el.kind = *kind;
    el.text = e.contains("text") && e["text"].is_string() ? e["text"].get<std::string>() : "";
    el.salience = e.contains("salience") && e["salience"].is_number() ? clamp01(e["salience"].get<double>())
                                                                      : kind_salience(*kind);
    out.elements.push_back(std::move(el));
  }
  std::stable_sort(out.elements.begin(), out.elements.end(),
                   [](const SummaryElement& a, const SummaryElement& b) { return a.salience > b.salience; });
  const auto narrative = j.find("narrative");
  out.narrative = narrative != j.end() && narrative->is_string() ? narrative->get<std::string>()
                                                                 : narrate(out.elements);
  return out;
}

UiSummary VisionLlmSummarizer::summarize(const device::UiSnapshot& s) {
  if (client_ == nullptr) throw Error(Errc::summarizer_unavailable, "no vision client configured");
  if (!s.raw_image_ref) throw Error(Errc::summarizer_unavailable, "snapshot " + snapshot_ref(s) + " has no image");
  const LlmRequest request = build_vision_prompt(s);
  std::string last;
  for (int attempt = 0; attempt < kMaxVisionAttempts; ++attempt) {
    std::string reply;
    try {
      reply = client_->complete(request);
    } catch (const Error& e) {
      throw Error(Errc::summarizer_unavailable, e.what());
    }
    try {
      return coerce_vision_reply(reply, s);
    } catch (const Error& e) {
      last = e.what();
    }
  }
  throw Error(Errc::coercion_failure, "no usable reply after " + std::to_string(kMaxVisionAttempts) + " attempts (" + last + ")");
}

UiSummary summarize_snapshot(const device::UiSnapshot& s, Summarizer& summarizer) { return summarizer.summarize(s); }

Json to_json(const SummaryElement& e) {
  Json j;
  j["path"] = e.path;
  j["kind"] = device::to_string(e.kind);
  j["text"] = e.text;
  j["salience"] = e.salience;
  return j;
}

Json to_json(const UiSummary& s) {
  Json j;
  j["snapshot_ref"] = s.snapshot_ref;
  j["summarizer"] = to_string(s.summarizer);
  Json elements = Json::array();
  for (const auto& e : s.elements) elements.push_back(to_json(e));
  j["elements"] = elements;
  j["narrative"] = s.narrative;
  return j;
}

UiSummary summary_from_json(const Json& j) {
  try {
    UiSummary s;
    s.snapshot_ref = j.at("snapshot_ref").get<std::string>();
    const auto id = j.at("summarizer").get<std::string>();
    if (id == "structural_stub") {
      s.summarizer = SummarizerId::structural_stub;
    } else if (id == "vision_llm") {
      s.summarizer = SummarizerId::vision_llm;
    } else {
      throw Error(Errc::parse_error, "unknown summarizer " + id);
    }
    for (const auto& e : j.at("elements")) {
      const auto kind = device::parse_element_kind(e.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::parse_error, "unknown element kind");
      s.elements.push_back({e.at("path").get<std::string>(), *kind, e.at("text").get<std::string>(),
                            e.at("salience").get<double>()});
    }
    s.narrative = j.at("narrative").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("summary: ") + e.what());
  }
}

}  // namespace sandbox::analysis
