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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cueaudit/providers.hpp"

namespace cueaudit::providers {

// One scripted reply. Exactly one of `fingerprint` / `match` selects it;
// entries with neither form the fallback queue.
struct ScriptEntry {
  std::optional<std::string> fingerprint;
  // Substring of the request's last user message.
  std::optional<std::string> match;
  std::string response;
  FinishReason finish_reason = FinishReason::stop;
  // Transient failures raised before this entry first succeeds.
  int faults = 0;
};

struct MockScript {
  std::vector<ScriptEntry> entries;

  MockScript& add_keyed(std::string fingerprint, std::string response, int faults = 0);
  MockScript& add_match(std::string needle, std::string response,
                        FinishReason finish = FinishReason::stop, int faults = 0);
  MockScript& add_fallback(std::string response);
};

// JSONL, one object per line: {fingerprint?, match?, response, finish_reason?, faults?}.
MockScript parse_mock_script(std::string_view content);
MockScript load_mock_script(const std::filesystem::path& path);

// Resolution order: exact fingerprint, then the first `match` entry whose
// needle occurs in the last user message, then the next unused fallback. A
// fallback is bound to the fingerprint that consumed it, so replays agree.
// Thread-safe.
class MockChatProvider final : public ChatProvider {
 public:
  explicit MockChatProvider(MockScript script, std::string name = "mock");

  std::string name() const override { return name_; }
  ChatResponse send(const ChatRequest& request) override;

  // Every attempt, including injected failures, in arrival order.
  std::vector<ChatRequest> calls() const;
  std::size_t call_count() const;
  // Attempts whose last user message contains `needle`.
  std::size_t calls_matching(std::string_view needle) const;

 private:
  std::string name_;
  MockScript script_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
  std::map<std::size_t, int> faults_left_;
  std::map<std::string, std::size_t> fallback_of_;
  std::size_t next_fallback_ = 0;
};

// Provider backed by a callable; the callable may throw TransientError.
class FunctionChatProvider final : public ChatProvider {
 public:
  using Handler = std::function<ChatResponse(const ChatRequest&)>;
  FunctionChatProvider(Handler handler, std::string name = "function");

  std::string name() const override { return name_; }
  ChatResponse send(const ChatRequest& request) override;
  std::size_t call_count() const;

 private:
  Handler handler_;
  std::string name_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

// Returns pre-registered vectors verbatim; unknown text is a ProviderError.
class ScriptedEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ScriptedEmbeddingProvider(std::map<std::string, EmbeddingVector> vectors,
                                     std::string name = "scripted");

  std::string name() const override { return name_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
  std::size_t batch_count() const;

 private:
  std::map<std::string, EmbeddingVector> vectors_;
  std::string name_;
  mutable std::mutex mu_;
  std::size_t batches_ = 0;
};

// Offline stand-in for a sentence encoder: each lowercase whitespace token
// maps to a fixed pseudo-random vector seeded by its FNV-1a hash, and a text
// embeds to the mean over its first `max_tokens` tokens. Identical across
// processes and platforms.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashedEmbeddingProvider(int dim = 384, int max_tokens = 512);

  std::string name() const override;
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
  EmbeddingVector embed_one(std::string_view text) const;

 private:
  int dim_;
  int max_tokens_;
};

}  // namespace cueaudit::providers
