#include "sandbox/common/llm_client.hpp"

#include "sandbox/common/error.hpp"
#include "sandbox/common/json.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>

namespace sandbox {
namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(Errc::invalid_request, "bad LLM endpoint '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

}  // namespace

std::optional<LlmConfig> llm_config_from_env() {
  const std::string endpoint = env_or("SANDBOX_LLM_ENDPOINT", "");
  if (endpoint.empty()) return std::nullopt;
  LlmConfig c;
  c.endpoint = endpoint;
  c.model = env_or("SANDBOX_LLM_MODEL", c.model);
  c.api_key = env_or("SANDBOX_LLM_API_KEY", "");
  return c;
}

HttpLlmClient::HttpLlmClient(LlmConfig config) : config_(std::move(config)) {}

std::string HttpLlmClient::complete(const LlmRequest& request) {
  const SplitUrl url = split_url(config_.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.origin.rfind("https://", 0) == 0) {
    throw Error(Errc::generation_failed, "built without TLS support; cannot reach " + url.origin);
  }
#endif
  httplib::Client client(url.origin);
  client.set_connection_timeout(config_.timeout_s, 0);
  client.set_read_timeout(config_.timeout_s, 0);

  Json user_content;
  if (request.image_ref) {
    user_content = Json::array();
    user_content.push_back(Json{{"type", "text"}, {"text", request.user}});
    user_content.push_back(Json{{"type", "image_url"}, {"image_url", Json{{"url", *request.image_ref}}}});
  } else {
    user_content = request.user;
  }
  Json body;
  body["model"] = config_.model;
  body["messages"] = Json::array({Json{{"role", "system"}, {"content", request.system}},
                                  Json{{"role", "user"}, {"content", user_content}}});
  body["temperature"] = 0;

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client.Post(url.path, headers, dump_line(body), "application/json");
  if (!res) {
    throw Error(Errc::generation_failed, "LLM endpoint unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::generation_failed, "LLM endpoint returned HTTP " + std::to_string(res->status));
  }
  const Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw Error(Errc::generation_failed, "LLM reply is not JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception&) {
    throw Error(Errc::generation_failed, "LLM reply missing choices[0].message.content");
  }
}

std::unique_ptr<LlmClient> make_llm_client_from_env() {
  auto config = llm_config_from_env();
  if (!config) return nullptr;
  return std::make_unique<HttpLlmClient>(std::move(*config));
}

}  // namespace sandbox
