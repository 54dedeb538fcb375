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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cueaudit/http.hpp"
#include "cueaudit/judging.hpp"
#include "cueaudit/laundering.hpp"
#include "cueaudit/providers.hpp"
#include "cueaudit/report.hpp"
#include "json.hpp"

namespace cueaudit::config {

struct ProviderSettings {
  std::string name;
  // openai | mock | hashed | http-embedding
  std::string kind;
  nlohmann::json options = nlohmann::json::object();
  double rate_per_second = 2.0;
  double burst = 4.0;
};

struct ModelRef {
  std::string name;  // display name; targets use it as the row label
  std::string provider;
  judging::ModelSpec spec;
};

struct NGramSettings {
  std::size_t k = 40;
  std::vector<std::size_t> orders{1, 2, 3};
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> instruction_words;
  std::optional<std::filesystem::path> lexicon;
};

struct DedupSettings {
  double threshold = 0.9;
  int sweep_lo = 70;
  int sweep_hi = 99;
  int sweep_step = 1;
};

struct Settings {
  std::map<std::string, ProviderSettings> providers;
  std::optional<ModelRef> launderer;
  std::optional<ModelRef> criteria;
  std::optional<ModelRef> judge;
  std::vector<ModelRef> targets;
  std::string embedding_provider = "hashed";
  std::size_t embedding_batch = 64;
  std::map<std::string, std::filesystem::path> templates;
  std::optional<std::filesystem::path> demos;
  std::optional<std::filesystem::path> criteria_demos;
  int max_iterations = 3;
  std::optional<double> target_asr;
  std::size_t demo_count = 8;
  std::size_t workers = 4;
  metrics::PracticalityBase pe_base = metrics::PracticalityBase::unsafe_responses;
  report::MeanAsrRule mean_asr_rule = report::MeanAsrRule::se_times_pe;
  providers::RetryPolicy retry;
  DedupSettings dedup;
  NGramSettings ngrams;
  // Verbatim input, for the run manifest.
  nlohmann::json raw = nlohmann::json::object();
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
Settings parse_settings(const nlohmann::json& j, const std::filesystem::path& base_dir);
Settings load_settings(const std::filesystem::path& path);
// No config file: a "hashed" embedding provider and nothing else.
Settings default_settings();

struct RegistryOptions {
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  std::uint64_t seed = 0;
};

// Builds providers once per name and hands out role-scoped clients that
// share the response cache.
class Registry {
 public:
  Registry(Settings settings, RegistryOptions options);

  const Settings& settings() const { return settings_; }

  std::shared_ptr<providers::ChatProvider> chat_provider(const std::string& name);
  std::shared_ptr<providers::EmbeddingProvider> embedding_provider(const std::string& name);

  // Cache namespace = role + model id.
  std::shared_ptr<providers::ChatClient> chat_client(const ModelRef& model, const std::string& role);
  std::shared_ptr<providers::EmbeddingClient> embedding_client();

  std::shared_ptr<judging::Judge> judge();
  laundering::Pipeline pipeline(const ModelRef& target);
  laundering::CampaignConfig campaign_config(const ModelRef& target) const;

  const ModelRef& target(const std::string& name) const;

 private:
  providers::ClientOptions client_options(const std::string& ns, const std::string& provider);
  std::shared_ptr<providers::Transport> transport();

  Settings settings_;
  RegistryOptions options_;
  std::shared_ptr<providers::ResponseCache> cache_;
  std::shared_ptr<providers::Transport> transport_;
  std::map<std::string, std::shared_ptr<providers::ChatProvider>> chat_;
  std::map<std::string, std::shared_ptr<providers::EmbeddingProvider>> embed_;
  std::map<std::string, std::shared_ptr<providers::RateLimiter>> limiters_;
  std::shared_ptr<judging::Judge> judge_;
};

}  // namespace cueaudit::config
