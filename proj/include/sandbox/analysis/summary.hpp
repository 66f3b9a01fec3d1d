#pragma once

#include "sandbox/common/json.hpp"
#include "sandbox/common/llm_client.hpp"
#include "sandbox/device/ui.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sandbox::analysis {

enum class SummarizerId { structural_stub, vision_llm };

std::string_view to_string(SummarizerId id);

struct SummaryElement {
  std::string path;  // ordinal path, e.g. "/badge#0"; empty when the summarizer cannot tell
  device::ElementKind kind = device::ElementKind::card;
  std::string text;
  double salience = 0.0;  // [0, 1]

  friend bool operator==(const SummaryElement&, const SummaryElement&) = default;
};

struct UiSummary {
  std::string snapshot_ref;
  std::vector<SummaryElement> elements;  // most salient first
  std::string narrative;
  SummarizerId summarizer = SummarizerId::structural_stub;

  friend bool operator==(const UiSummary&, const UiSummary&) = default;
};

// "app_id@t", how reports and summaries point at a snapshot.
std::string snapshot_ref(const device::UiSnapshot& s);

// Base salience of an element kind before the depth discount:
// notification 1.0, badge 0.9, message 0.8, banner 0.7, price 0.6, mode_flag 0.5, card 0.4.
double kind_salience(device::ElementKind kind);
// Each level below the top multiplies salience by this.
inline constexpr double kDepthDiscount = 0.9;

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual SummarizerId id() const = 0;
  virtual UiSummary summarize(const device::UiSnapshot& s) = 0;
};

// Tree walk in screen order, then a stable sort by salience.
class StructuralStub final : public Summarizer {
 public:
  SummarizerId id() const override { return SummarizerId::structural_stub; }
  UiSummary summarize(const device::UiSnapshot& s) override;
};

inline constexpr int kMaxVisionAttempts = 3;

// Sends raw_image_ref to a vision model and coerces the reply into a UiSummary.
// Throws Error(summarizer_unavailable) without a client or image, and
// Error(coercion_failure) when every attempt returns something unusable.
class VisionLlmSummarizer final : public Summarizer {
 public:
  explicit VisionLlmSummarizer(LlmClient* client) : client_(client) {}
  SummarizerId id() const override { return SummarizerId::vision_llm; }
  UiSummary summarize(const device::UiSnapshot& s) override;

 private:
  LlmClient* client_;
};

UiSummary summarize_snapshot(const device::UiSnapshot& s, Summarizer& summarizer);

LlmRequest build_vision_prompt(const device::UiSnapshot& s);
// Throws Error(coercion_failure) with the reason.
UiSummary coerce_vision_reply(const std::string& reply, const device::UiSnapshot& s);

Json to_json(const SummaryElement& e);
Json to_json(const UiSummary& s);
UiSummary summary_from_json(const Json& j);

}  // namespace sandbox::analysis
