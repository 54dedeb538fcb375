// Copyright 2026 The cueaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cueaudit/http.hpp"

#include <algorithm>
#include <cstdlib>

#include "httplib.h"

namespace cueaudit::providers {

using nlohmann::json;

namespace {

HttpHeaders auth_headers(const std::string& env_name) {
  HttpHeaders headers;
  if (env_name.empty()) return headers;
  const char* key = std::getenv(env_name.c_str());
  if (!key || !*key) throw ConfigError("environment variable " + env_name + " is not set");
  headers.emplace_back("Authorization", std::string("Bearer ") + key);
  return headers;
}

void check_status(const HttpResponse& r, const std::string& url) {
  if (r.status >= 200 && r.status < 300) return;
  const auto snippet = r.body.substr(0, 300);
  const auto msg = "HTTP " + std::to_string(r.status) + " from " + url + ": " + snippet;
  if (is_transient_status(r.status)) throw TransientError(msg);
  throw ProviderError(msg);
}

FinishReason map_finish(const json& v) {
  if (!v.is_string()) return FinishReason::stop;
  const auto s = v.get<std::string>();
  if (s == "stop" || s == "tool_calls" || s == "end_turn") return FinishReason::stop;
  if (s == "length" || s == "max_tokens") return FinishReason::length;
  if (s == "content_filter") return FinishReason::filtered;
  return FinishReason::error;
}

}  // namespace

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("malformed URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool is_transient_status(int status) {
  return status == 408 || status == 409 || status == 425 || status == 429 || status >= 500;
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::post(const std::string& url, const HttpHeaders& headers,
                                    const std::string& body) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto result = client.Post(path, h, body, "application/json");
  if (!result) {
    throw TransientError("request to " + url + " failed: " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

HttpResponse OfflineTransport::post(const std::string& url, const HttpHeaders&, const std::string&) {
  throw OfflineViolation("offline mode: refusing network call to " + url);
}

OpenAIChatProvider::OpenAIChatProvider(OpenAIChatConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) throw ConfigError("chat provider '" + config_.name + "': null transport");
}

json OpenAIChatProvider::request_body(const ChatRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body = {{"model", request.model_id}, {"messages", std::move(messages)}};
  body[config_.max_tokens_field] = request.max_output_tokens;
  if (auto it = config_.effort_values.find(request.reasoning_effort);
      it != config_.effort_values.end()) {
    body["reasoning_effort"] = it->second;
  }
  if (request.sampling.temperature) body["temperature"] = *request.sampling.temperature;
  if (request.sampling.top_p) body["top_p"] = *request.sampling.top_p;
  return body;
}

ChatResponse OpenAIChatProvider::parse_body(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProviderError(std::string("chat response is not JSON: ") + e.what());
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw ProviderError("chat response has no choices");
  }
  const auto& choice = j["choices"][0];
  ChatResponse r;
  if (choice.contains("message") && choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    r.text = choice["message"]["content"].get<std::string>();
  }
  r.finish_reason = map_finish(choice.value("finish_reason", json()));
  if (j.contains("usage") && j["usage"].is_object()) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  if (r.text.empty() && r.finish_reason == FinishReason::stop) r.finish_reason = FinishReason::error;
  return r;
}

ChatResponse OpenAIChatProvider::send(const ChatRequest& request) {
  const auto url = config_.base_url + "/chat/completions";
  const auto response = transport_->post(url, auth_headers(config_.api_key_env),
                                         request_body(request).dump());
  check_status(response, url);
  return parse_body(response.body);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config,
                                             std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (!transport_) throw ConfigError("embedding provider: null transport");
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  const auto url = config_.base_url + "/embeddings";
  const json body = {{"model", config_.model},
                     {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto response = transport_->post(url, auth_headers(config_.api_key_env), body.dump());
  check_status(response, url);
  std::vector<EmbeddingVector> out(texts.size());
  try {
    const auto j = json::parse(response.body);
    const auto& data = j.at("data");
    if (data.size() != texts.size()) {
      throw ProviderError("embedding response has " + std::to_string(data.size()) + " items for " +
                          std::to_string(texts.size()) + " inputs");
    }
    for (std::size_t k = 0; k < data.size(); ++k) {
      const auto index = data[k].value("index", k);
      if (index >= out.size()) throw ProviderError("embedding response index out of range");
      const auto values = data[k].at("embedding").get<std::vector<double>>();
      out[index] = Eigen::Map<const EmbeddingVector>(values.data(),
                                                     static_cast<Eigen::Index>(values.size()));
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what());
  }
  return out;
}

}  // namespace cueaudit::providers
