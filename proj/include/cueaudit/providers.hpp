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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cueaudit/embedding.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/random.hpp"
#include "json.hpp"

namespace cueaudit::providers {

enum class Role { system, user, assistant };
enum class ReasoningEffort { none, low, standard };
enum class FinishReason { stop, length, filtered, error };

std::string_view to_string(Role r);
std::string_view to_string(ReasoningEffort e);
std::string_view to_string(FinishReason f);
Role parse_role(std::string_view s);
ReasoningEffort parse_effort(std::string_view s);
FinishReason parse_finish_reason(std::string_view s);

struct Message {
  Role role = Role::user;
  std::string content;
  bool operator==(const Message&) const = default;
};

// Unset fields mean "provider default" and are left out of the wire request
// and the fingerprint.
struct Sampling {
  std::optional<double> temperature;
  std::optional<double> top_p;
  bool operator==(const Sampling&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<Message> messages;
  int max_output_tokens = 1024;
  ReasoningEffort reasoning_effort = ReasoningEffort::standard;
  Sampling sampling;

  // Throws PreconditionError: no user message, max_output_tokens < 1, empty
  // model id.
  void validate() const;

  // Content of the last user message.
  const std::string& last_user_content() const;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  Usage usage;
  // Client-side bookkeeping; not part of the cached payload.
  int attempts = 0;
  bool from_cache = false;

  bool truncated() const { return finish_reason == FinishReason::length; }
};

nlohmann::json to_json(const ChatRequest& r);
nlohmann::json to_json(const ChatResponse& r);
ChatResponse response_from_json(const nlohmann::json& j);

// SHA-256 over the canonical request encoding: model id, ordered
// (role, content) messages, output cap, reasoning effort, and any overridden
// sampling parameters.
std::string fingerprint(const ChatRequest& request);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  // One attempt. Throws TransientError for retriable failures and
  // ProviderError otherwise.
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Identifies the model/checkpoint; part of the embedding cache key.
  virtual std::string name() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

void real_sleep(std::chrono::milliseconds d);

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_delay{500};
  std::chrono::milliseconds max_delay{30000};
  double multiplier = 2.0;
  // Uniform extra delay in [0, jitter * delay).
  double jitter = 0.1;

  // Delay before retry number `retry` (0-based), before jitter.
  std::chrono::milliseconds base_delay(int retry) const;
};

// Runs `attempt` until it returns or throws a non-transient error. Attempts
// never exceed 1 + policy.max_retries; the count is written to *attempts.
template <typename F>
auto call_with_retries(F&& attempt, const RetryPolicy& policy, const Sleeper& sleep, Rng& rng,
                       int* attempts) -> decltype(attempt()) {
  for (int retry = 0;; ++retry) {
    if (attempts) *attempts = retry + 1;
    try {
      return attempt();
    } catch (const TransientError& e) {
      if (retry >= policy.max_retries) {
        throw RetriesExhausted("gave up after " + std::to_string(retry + 1) +
                                   " attempts; last error: " + e.what(),
                               retry + 1);
      }
      auto delay = policy.base_delay(retry);
      if (policy.jitter > 0) {
        delay += std::chrono::milliseconds(
            static_cast<std::int64_t>(rng.uniform01() * policy.jitter * delay.count()));
      }
      sleep(delay);
    }
  }
}

// Token bucket. rate <= 0 disables limiting. The clock and sleeper are
// injectable so tests run without waiting.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  RateLimiter(double rate_per_second, double burst, Clock clock = {}, Sleeper sleep = {});

  // Blocks until one token is available, then consumes it. Returns the time
  // spent waiting.
  std::chrono::milliseconds acquire();

 private:
  void refill(std::chrono::steady_clock::time_point now);

  double rate_;
  double burst_;
  double tokens_;
  Clock clock_;
  Sleeper sleep_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

// Content-addressed JSON payload cache: an in-memory map, optionally backed
// by files at <dir>/<key[0:2]>/<key>.json. Concurrent writers of the same key
// write identical values; the last rename wins.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  // Throws CacheCorruption if the stored file is not valid JSON.
  std::optional<nlohmann::json> get(const std::string& key);
  void put(const std::string& key, const nlohmann::json& payload);

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  std::unordered_map<std::string, nlohmann::json> memory_;
  std::shared_mutex mu_;
  std::atomic<std::uint64_t> tmp_counter_{0};
};

struct ClientOptions {
  // Separates roles (launderer, judge, target, ...) that may hit the same
  // model with the same text.
  std::string cache_namespace = "default";
  RetryPolicy retry;
  std::shared_ptr<ResponseCache> cache;
  std::shared_ptr<RateLimiter> limiter;
  Sleeper sleep = real_sleep;
  std::uint64_t jitter_seed = 0;
};

struct ClientStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t provider_attempts = 0;
};

class ChatClient {
 public:
  ChatClient(std::shared_ptr<ChatProvider> provider, ClientOptions options = {});

  // Cache hit: returns the stored response with no provider call. Miss:
  // rate-limited provider call with exponential-backoff retries, then cache.
  ChatResponse complete(const ChatRequest& request);

  std::string cache_key(const ChatRequest& request) const;
  ClientStats stats() const;
  const ChatProvider& provider() const { return *provider_; }

 private:
  std::shared_ptr<ChatProvider> provider_;
  ClientOptions options_;
  std::mutex rng_mu_;
  Rng rng_;
  std::atomic<std::uint64_t> requests_{0}, hits_{0}, attempts_{0};
};

class EmbeddingClient {
 public:
  EmbeddingClient(std::shared_ptr<EmbeddingProvider> provider, ClientOptions options = {},
                  std::size_t batch_size = 64);

  // One vector per text, order preserved. Each distinct text is cached and
  // sent at most once per call.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);

  ClientStats stats() const;

 private:
  std::string cache_key(const std::string& text) const;

  std::shared_ptr<EmbeddingProvider> provider_;
  ClientOptions options_;
  std::size_t batch_size_;
  Rng rng_;
  std::atomic<std::uint64_t> requests_{0}, hits_{0}, attempts_{0};
};

}  // namespace cueaudit::providers
