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

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cueaudit/providers.hpp"

namespace cueaudit::providers {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// POST-only transport. Throws TransientError when no response was received.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const HttpHeaders& headers,
                            const std::string& body) = 0;
};

class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120));
  HttpResponse post(const std::string& url, const HttpHeaders& headers,
                    const std::string& body) override;

 private:
  std::chrono::seconds timeout_;
};

// Installed by --offline: any live call is a hard failure.
class OfflineTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const HttpHeaders&, const std::string&) override;
};

// Splits "https://host:port/base" into ("https://host:port", "/base").
std::pair<std::string, std::string> split_url(const std::string& url);

// 408, 409, 425, 429 and 5xx.
bool is_transient_status(int status);

struct OpenAIChatConfig {
  std::string base_url = "https://api.openai.com/v1";
  // Environment variable holding the bearer token; empty sends no token.
  std::string api_key_env = "OPENAI_API_KEY";
  std::string max_tokens_field = "max_completion_tokens";
  // Wire value per effort level; levels without an entry are not sent.
  std::map<ReasoningEffort, std::string> effort_values;
  std::string name = "openai";
};

// OpenAI-compatible /chat/completions client.
class OpenAIChatProvider final : public ChatProvider {
 public:
  OpenAIChatProvider(OpenAIChatConfig config, std::shared_ptr<Transport> transport);

  std::string name() const override { return config_.name; }
  ChatResponse send(const ChatRequest& request) override;

  nlohmann::json request_body(const ChatRequest& request) const;
  static ChatResponse parse_body(const std::string& body);

 private:
  OpenAIChatConfig config_;
  std::shared_ptr<Transport> transport_;
};

struct HttpEmbeddingConfig {
  std::string base_url = "http://127.0.0.1:8089/v1";
  std::string model = "sentence-transformers/all-mpnet-base-v2";
  std::string api_key_env;
};

// OpenAI-compatible /embeddings client.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(HttpEmbeddingConfig config, std::shared_ptr<Transport> transport);

  std::string name() const override { return "http:" + config_.model; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  HttpEmbeddingConfig config_;
  std::shared_ptr<Transport> transport_;
};

}  // namespace cueaudit::providers
