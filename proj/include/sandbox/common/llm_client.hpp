#pragma once

#include <memory>
#include <optional>
#include <string>

namespace sandbox {

struct LlmRequest {
  std::string system;
  std::string user;
  // Image URL or data URI for vision-capable models.
  std::optional<std::string> image_ref;
};

// Text-completion boundary used by persona generation and snapshot
// summarization. Implementations must be callable from several threads.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the assistant text or throws Error(generation_failed).
  virtual std::string complete(const LlmRequest& request) = 0;
};

struct LlmConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model = "gpt-4";
  std::string api_key;
  int timeout_s = 60;
};

// SANDBOX_LLM_ENDPOINT, SANDBOX_LLM_MODEL, SANDBOX_LLM_API_KEY.
std::optional<LlmConfig> llm_config_from_env();

// OpenAI-compatible chat-completions client over HTTP(S).
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmConfig config);
  std::string complete(const LlmRequest& request) override;

 private:
  LlmConfig config_;
};

std::unique_ptr<LlmClient> make_llm_client_from_env();

}  // namespace sandbox
