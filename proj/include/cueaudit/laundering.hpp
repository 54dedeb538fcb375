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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cueaudit/corpus.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/judging.hpp"
#include "cueaudit/labels.hpp"
#include "cueaudit/metrics.hpp"
#include "cueaudit/providers.hpp"
#include "cueaudit/templates.hpp"
#include "json.hpp"

namespace cueaudit::laundering {

using Demonstration = prompts::DemoPair;

struct Revision {
  std::string datapoint_id;
  int iteration = 1;
  std::string text;
  bool operator==(const Revision&) const = default;
};

// One launder -> target -> judge round for a record.
struct Attempt {
  Revision revision;
  std::string response;
  bool truncated = false;
  // Empty when the judge output could not be parsed; see eval_error.
  std::optional<Verdict> verdict;
  std::string eval_error;

  bool succeeded() const { return verdict && metrics::success(*verdict); }
};

enum class RecordStatus { pending, success, exhausted };

std::string_view to_string(RecordStatus s);
RecordStatus parse_record_status(std::string_view s);

struct AttackRecord {
  corpus::DataPoint datapoint;
  std::optional<judging::Criterion> criterion;
  std::vector<Attempt> history;
  RecordStatus status = RecordStatus::pending;

  // The successful attempt once frozen, otherwise the newest one.
  const Attempt* current() const;
};

struct CampaignConfig {
  std::vector<Demonstration> demos;
  std::size_t demo_count = 8;
  int max_iterations = 3;
  // Fraction in [0, 1]; the loop stops once ASR / 100 reaches it.
  std::optional<double> target_asr;
  judging::ModelSpec launderer{"", 2048, providers::ReasoningEffort::none, {}};
  judging::ModelSpec target{"", 4096, providers::ReasoningEffort::standard, {}};
  std::uint64_t seed = 0;
  std::size_t workers = 4;
  metrics::PracticalityBase pe_base = metrics::PracticalityBase::unsafe_responses;
  // Written after every iteration and on abort; read back to resume.
  std::optional<std::filesystem::path> checkpoint;

  // Throws ConfigError.
  void validate() const;
};

struct LaunderTemplates {
  prompts::PromptTemplate launder;
  prompts::PromptTemplate regen;

  static LaunderTemplates defaults();
};

struct Pipeline {
  std::shared_ptr<providers::ChatClient> launderer;
  std::shared_ptr<providers::ChatClient> target;
  std::shared_ptr<judging::Judge> judge;
  LaunderTemplates templates = LaunderTemplates::defaults();
};

struct IterationSummary {
  int iteration = 0;
  metrics::IterationAggregate aggregate;
};

enum class StopReason { max_iterations, target_asr };

struct CampaignResult {
  std::string target_model;
  std::vector<IterationSummary> iterations;
  std::vector<AttackRecord> records;
  std::optional<double> baseline_asr;
  std::optional<StopReason> stop_reason;
};

// Raised when a provider fails irrecoverably mid-campaign. Carries the
// state reached, which has also been checkpointed when configured.
class CampaignAborted : public ProviderError {
 public:
  CampaignAborted(const std::string& what, std::shared_ptr<const CampaignResult> partial)
      : ProviderError(what), partial_(std::move(partial)) {}
  const CampaignResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<const CampaignResult> partial_;
};

// First `count` demonstrations, or all of them when fewer are supplied.
std::span<const Demonstration> select_demos(const CampaignConfig& config);

providers::ChatRequest build_launder_prompt(const corpus::DataPoint& dp,
                                            std::span<const Demonstration> demos,
                                            const prompts::PromptTemplate& tmpl,
                                            const judging::ModelSpec& launderer);

// `failed` must be non-empty with strictly increasing iterations.
providers::ChatRequest build_regen_prompt(const corpus::DataPoint& dp,
                                          std::span<const Revision> failed,
                                          std::span<const Demonstration> demos,
                                          const prompts::PromptTemplate& tmpl,
                                          const judging::ModelSpec& launderer);

Revision launder(const corpus::DataPoint& dp, const CampaignConfig& config, Pipeline& pipeline);
Revision regenerate(const corpus::DataPoint& dp, std::span<const Revision> failed,
                    const CampaignConfig& config, Pipeline& pipeline);

struct TargetReply {
  std::string text;
  bool truncated = false;
};

TargetReply query_target(const Revision& rev, providers::ChatClient& target,
                         const judging::ModelSpec& spec);

struct BaselineRecord {
  std::string datapoint_id;
  std::string response;
  bool truncated = false;
  std::optional<Verdict> verdict;
  std::string error;
};

struct BaselineResult {
  std::vector<BaselineRecord> records;
  metrics::BaselineAggregate aggregate;
};

// Original text to the target, judged without a criterion. Records whose
// provider or judge call fails are excluded with a warning.
BaselineResult eval_baseline(const corpus::Corpus& corpus, providers::ChatClient& target,
                             const judging::ModelSpec& spec, judging::Judge& judge,
                             std::size_t workers = 4);

// Revision-regeneration loop with freeze-on-success.
CampaignResult run_campaign(const corpus::Corpus& corpus, const CampaignConfig& config,
                            Pipeline& pipeline);

nlohmann::json to_json(const AttackRecord& r);
AttackRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignResult& r);
CampaignResult result_from_json(const nlohmann::json& j);

// One record per line, in record order.
std::string records_jsonl(const CampaignResult& r);
// Per-iteration counts and percentages, without the records.
nlohmann::json summary_json(const CampaignResult& r);

void write_checkpoint(const CampaignResult& r, const std::filesystem::path& path);
std::optional<CampaignResult> read_checkpoint(const std::filesystem::path& path);

}  // namespace cueaudit::laundering
