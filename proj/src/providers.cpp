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

#include "cueaudit/providers.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "cueaudit/hashing.hpp"

namespace cueaudit::providers {

using nlohmann::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(ReasoningEffort e) {
  switch (e) {
    case ReasoningEffort::none: return "none";
    case ReasoningEffort::low: return "low";
    case ReasoningEffort::standard: return "standard";
  }
  return "standard";
}

std::string_view to_string(FinishReason f) {
  switch (f) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::filtered: return "filtered";
    case FinishReason::error: return "error";
  }
  return "error";
}

Role parse_role(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw InputError("unknown message role '" + std::string(s) + "'");
}

ReasoningEffort parse_effort(std::string_view s) {
  if (s == "none") return ReasoningEffort::none;
  if (s == "low") return ReasoningEffort::low;
  if (s == "standard") return ReasoningEffort::standard;
  throw ConfigError("unknown reasoning effort '" + std::string(s) + "'");
}

FinishReason parse_finish_reason(std::string_view s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  if (s == "filtered") return FinishReason::filtered;
  if (s == "error") return FinishReason::error;
  throw InputError("unknown finish reason '" + std::string(s) + "'");
}

void ChatRequest::validate() const {
  if (model_id.empty()) throw PreconditionError("chat request: empty model id");
  if (max_output_tokens < 1) throw PreconditionError("chat request: max_output_tokens must be >= 1");
  const bool has_user = std::any_of(messages.begin(), messages.end(),
                                    [](const Message& m) { return m.role == Role::user; });
  if (!has_user) throw PreconditionError("chat request: at least one user message is required");
}

const std::string& ChatRequest::last_user_content() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  throw PreconditionError("chat request: no user message");
}

json to_json(const ChatRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json j = {{"model", r.model_id},
            {"messages", std::move(messages)},
            {"max_output_tokens", r.max_output_tokens},
            {"reasoning_effort", to_string(r.reasoning_effort)}};
  if (r.sampling.temperature) j["temperature"] = *r.sampling.temperature;
  if (r.sampling.top_p) j["top_p"] = *r.sampling.top_p;
  return j;
}

json to_json(const ChatResponse& r) {
  return {{"text", r.text},
          {"finish_reason", to_string(r.finish_reason)},
          {"usage", {{"prompt_tokens", r.usage.prompt_tokens},
                     {"completion_tokens", r.usage.completion_tokens}}}};
}

ChatResponse response_from_json(const json& j) {
  ChatResponse r;
  r.text = j.at("text").get<std::string>();
  r.finish_reason = parse_finish_reason(j.at("finish_reason").get<std::string>());
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  return r;
}

std::string fingerprint(const ChatRequest& request) {
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return sha256_hex(to_json(request).dump());
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

std::chrono::milliseconds RetryPolicy::base_delay(int retry) const {
  double d = static_cast<double>(initial_delay.count());
  for (int i = 0; i < retry && d < static_cast<double>(max_delay.count()); ++i) d *= multiplier;
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::min(d, static_cast<double>(max_delay.count()))));
}

RateLimiter::RateLimiter(double rate_per_second, double burst, Clock clock, Sleeper sleep)
    : rate_(rate_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      sleep_(sleep ? std::move(sleep) : Sleeper(real_sleep)),
      last_(clock_()) {}

void RateLimiter::refill(std::chrono::steady_clock::time_point now) {
  const double elapsed = std::chrono::duration<double>(now - last_).count();
  if (elapsed > 0) {
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    last_ = now;
  }
}

std::chrono::milliseconds RateLimiter::acquire() {
  if (rate_ <= 0) return std::chrono::milliseconds(0);
  std::lock_guard lock(mu_);
  std::chrono::milliseconds waited(0);
  refill(clock_());
  while (tokens_ < 1.0) {
    const double deficit = 1.0 - tokens_;
    const auto wait = std::chrono::milliseconds(
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(deficit / rate_ * 1000.0))));
    sleep_(wait);
    waited += wait;
    refill(clock_());
  }
  tokens_ -= 1.0;
  return waited;
}

ChatClient::ChatClient(std::shared_ptr<ChatProvider> provider, ClientOptions options)
    : provider_(std::move(provider)), options_(std::move(options)), rng_(options_.jitter_seed) {
  if (!provider_) throw PreconditionError("ChatClient: null provider");
  if (!options_.cache) options_.cache = std::make_shared<ResponseCache>();
  if (!options_.sleep) options_.sleep = real_sleep;
}

std::string ChatClient::cache_key(const ChatRequest& request) const {
  return sha256_hex("chat\n" + options_.cache_namespace + "\n" + provider_->name() + "\n" +
                    fingerprint(request));
}

ChatResponse ChatClient::complete(const ChatRequest& request) {
  request.validate();
  ++requests_;
  const auto key = cache_key(request);
  if (auto cached = options_.cache->get(key)) {
    ++hits_;
    ChatResponse r;
    try {
      r = response_from_json(cached->at("response"));
    } catch (const json::exception& e) {
      throw CacheCorruption("cache entry " + key + " is malformed: " + e.what());
    }
    r.from_cache = true;
    return r;
  }

  int attempts = 0;
  auto attempt = [&] {
    ++attempts_;
    if (options_.limiter) options_.limiter->acquire();
    return provider_->send(request);
  };
  ChatResponse response;
  {
    // Jitter draws are the only shared mutable state; keep them ordered.
    Rng local(0);
    {
      std::lock_guard lock(rng_mu_);
      local = Rng(rng_.next());
    }
    response = call_with_retries(attempt, options_.retry, options_.sleep, local, &attempts);
  }
  response.attempts = attempts;
  options_.cache->put(key, json{{"request", to_json(request)}, {"response", to_json(response)}});
  return response;
}

ClientStats ChatClient::stats() const { return {requests_.load(), hits_.load(), attempts_.load()}; }

EmbeddingClient::EmbeddingClient(std::shared_ptr<EmbeddingProvider> provider,
                                 ClientOptions options, std::size_t batch_size)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      batch_size_(std::max<std::size_t>(1, batch_size)),
      rng_(options_.jitter_seed) {
  if (!provider_) throw PreconditionError("EmbeddingClient: null provider");
  if (!options_.cache) options_.cache = std::make_shared<ResponseCache>();
  if (!options_.sleep) options_.sleep = real_sleep;
}

std::string EmbeddingClient::cache_key(const std::string& text) const {
  return sha256_hex("embed\n" + options_.cache_namespace + "\n" + provider_->name() + "\n" + text);
}

std::vector<EmbeddingVector> EmbeddingClient::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw PreconditionError("embed: no texts");
  requests_ += texts.size();

  std::unordered_map<std::string, EmbeddingVector> resolved;
  std::vector<std::string> missing;
  for (const auto& t : texts) {
    if (resolved.contains(t) || std::find(missing.begin(), missing.end(), t) != missing.end()) {
      continue;
    }
    if (auto cached = options_.cache->get(cache_key(t))) {
      try {
        const auto values = cached->at("embedding").get<std::vector<double>>();
        resolved.emplace(t, Eigen::Map<const EmbeddingVector>(values.data(),
                                                              static_cast<Eigen::Index>(values.size())));
      } catch (const json::exception& e) {
        throw CacheCorruption("embedding cache entry is malformed: " + std::string(e.what()));
      }
      ++hits_;
    } else {
      missing.push_back(t);
    }
  }

  for (std::size_t start = 0; start < missing.size(); start += batch_size_) {
    const std::size_t len = std::min(batch_size_, missing.size() - start);
    std::span<const std::string> batch(missing.data() + start, len);
    auto attempt = [&] {
      ++attempts_;
      if (options_.limiter) options_.limiter->acquire();
      return provider_->embed_batch(batch);
    };
    auto vectors = call_with_retries(attempt, options_.retry, options_.sleep, rng_, nullptr);
    if (vectors.size() != len) {
      throw ProviderError("embedding provider returned " + std::to_string(vectors.size()) +
                          " vectors for " + std::to_string(len) + " texts");
    }
    for (std::size_t i = 0; i < len; ++i) {
      options_.cache->put(cache_key(batch[i]),
                          json{{"embedding", std::vector<double>(vectors[i].data(),
                                                                 vectors[i].data() + vectors[i].size())}});
      resolved.emplace(batch[i], std::move(vectors[i]));
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(resolved.at(t));
  const auto dim = out.front().size();
  for (const auto& v : out) {
    if (v.size() != dim) throw ProviderError("embedding provider returned ragged dimensions");
  }
  return out;
}

ClientStats EmbeddingClient::stats() const {
  return {requests_.load(), hits_.load(), attempts_.load()};
}

}  // namespace cueaudit::providers
