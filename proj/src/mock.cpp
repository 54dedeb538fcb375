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

#include "cueaudit/mock.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cueaudit/hashing.hpp"
#include "cueaudit/random.hpp"

namespace cueaudit::providers {

using nlohmann::json;

MockScript& MockScript::add_keyed(std::string fingerprint, std::string response, int faults) {
  entries.push_back({std::move(fingerprint), std::nullopt, std::move(response), FinishReason::stop,
                     faults});
  return *this;
}

MockScript& MockScript::add_match(std::string needle, std::string response, FinishReason finish,
                                  int faults) {
  entries.push_back({std::nullopt, std::move(needle), std::move(response), finish, faults});
  return *this;
}

MockScript& MockScript::add_fallback(std::string response) {
  entries.push_back({std::nullopt, std::nullopt, std::move(response), FinishReason::stop, 0});
  return *this;
}

MockScript parse_mock_script(std::string_view content) {
  MockScript script;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = json::parse(line);
      ScriptEntry e;
      if (j.contains("fingerprint")) e.fingerprint = j["fingerprint"].get<std::string>();
      if (j.contains("match")) e.match = j["match"].get<std::string>();
      if (e.fingerprint && e.match) {
        throw InputError("mock script line " + std::to_string(line_no) +
                         ": 'fingerprint' and 'match' are mutually exclusive");
      }
      e.response = j.at("response").get<std::string>();
      if (j.contains("finish_reason")) {
        e.finish_reason = parse_finish_reason(j["finish_reason"].get<std::string>());
      }
      e.faults = j.value("faults", 0);
      if (e.faults < 0) throw InputError("mock script line " + std::to_string(line_no) + ": negative faults");
      script.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw InputError("mock script line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mock script '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mock_script(buf.str());
}

MockChatProvider::MockChatProvider(MockScript script, std::string name)
    : name_(std::move(name)), script_(std::move(script)) {
  for (std::size_t i = 0; i < script_.entries.size(); ++i) {
    if (script_.entries[i].faults > 0) faults_left_[i] = script_.entries[i].faults;
  }
}

ChatResponse MockChatProvider::send(const ChatRequest& request) {
  const auto fp = fingerprint(request);
  const auto& last_user = request.last_user_content();
  std::lock_guard lock(mu_);
  log_.push_back(request);

  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < script_.entries.size() && !chosen; ++i) {
    if (script_.entries[i].fingerprint == fp) chosen = i;
  }
  for (std::size_t i = 0; i < script_.entries.size() && !chosen; ++i) {
    const auto& m = script_.entries[i].match;
    if (m && last_user.find(*m) != std::string::npos) chosen = i;
  }
  if (!chosen) {
    if (auto it = fallback_of_.find(fp); it != fallback_of_.end()) {
      chosen = it->second;
    } else {
      for (; next_fallback_ < script_.entries.size(); ++next_fallback_) {
        const auto& e = script_.entries[next_fallback_];
        if (!e.fingerprint && !e.match) {
          chosen = next_fallback_++;
          fallback_of_.emplace(fp, *chosen);
          break;
        }
      }
    }
  }
  if (!chosen) throw ProviderError("mock '" + name_ + "': no scripted response for request " + fp);

  if (auto it = faults_left_.find(*chosen); it != faults_left_.end() && it->second > 0) {
    --it->second;
    throw TransientError("mock '" + name_ + "': injected transient failure");
  }
  const auto& e = script_.entries[*chosen];
  ChatResponse r;
  r.text = e.response;
  r.finish_reason = e.finish_reason;
  r.usage.completion_tokens = static_cast<int>(e.response.size() / 4);
  return r;
}

std::vector<ChatRequest> MockChatProvider::calls() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockChatProvider::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

std::size_t MockChatProvider::calls_matching(std::string_view needle) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(log_.begin(), log_.end(), [&](const ChatRequest& r) {
    return r.last_user_content().find(needle) != std::string::npos;
  }));
}

FunctionChatProvider::FunctionChatProvider(Handler handler, std::string name)
    : handler_(std::move(handler)), name_(std::move(name)) {}

ChatResponse FunctionChatProvider::send(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  return handler_(request);
}

std::size_t FunctionChatProvider::call_count() const {
  std::lock_guard lock(mu_);
  return calls_;
}

ScriptedEmbeddingProvider::ScriptedEmbeddingProvider(std::map<std::string, EmbeddingVector> vectors,
                                                     std::string name)
    : vectors_(std::move(vectors)), name_(std::move(name)) {}

std::vector<EmbeddingVector> ScriptedEmbeddingProvider::embed_batch(
    std::span<const std::string> texts) {
  {
    std::lock_guard lock(mu_);
    ++batches_;
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = vectors_.find(t);
    if (it == vectors_.end()) throw ProviderError("scripted embedding: no vector for '" + t + "'");
    out.push_back(it->second);
  }
  return out;
}

std::size_t ScriptedEmbeddingProvider::batch_count() const {
  std::lock_guard lock(mu_);
  return batches_;
}

HashedEmbeddingProvider::HashedEmbeddingProvider(int dim, int max_tokens)
    : dim_(dim), max_tokens_(max_tokens) {
  if (dim < 1 || max_tokens < 1) throw ConfigError("hashed embedding: dim and max_tokens must be >= 1");
}

std::string HashedEmbeddingProvider::name() const {
  return "hashed-" + std::to_string(dim_) + "-" + std::to_string(max_tokens_);
}

EmbeddingVector HashedEmbeddingProvider::embed_one(std::string_view text) const {
  EmbeddingVector sum = EmbeddingVector::Zero(dim_);
  int count = 0;
  std::string token;
  auto flush = [&] {
    if (token.empty() || count >= max_tokens_) {
      token.clear();
      return;
    }
    std::uint64_t state = fnv1a64(token);
    for (int d = 0; d < dim_; ++d) {
      state = splitmix64(state);
      sum(d) += static_cast<double>(state >> 11) * 0x1.0p-52 - 1.0;
    }
    ++count;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  if (count == 0) throw PreconditionError("hashed embedding: text has no tokens");
  return sum / count;
}

std::vector<EmbeddingVector> HashedEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

}  // namespace cueaudit::providers
