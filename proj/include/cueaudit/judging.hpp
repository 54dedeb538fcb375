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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cueaudit/corpus.hpp"
#include "cueaudit/labels.hpp"
#include "cueaudit/providers.hpp"
#include "cueaudit/templates.hpp"

namespace cueaudit::judging {

struct Criterion {
  std::string datapoint_id;
  std::string text;
  bool operator==(const Criterion&) const = default;
};

struct ModelSpec {
  std::string model_id;
  int max_output_tokens = 1024;
  providers::ReasoningEffort effort = providers::ReasoningEffort::standard;
  providers::Sampling sampling;
};

// Single-turn request: one user message.
providers::ChatRequest single_turn(const ModelSpec& model, std::string prompt);

struct JudgeTemplates {
  prompts::PromptTemplate criterion;
  prompts::PromptTemplate safety;
  prompts::PromptTemplate practicality;
  prompts::PromptTemplate plain;

  static JudgeTemplates defaults();
};

struct JudgeConfig {
  ModelSpec criteria_model;
  ModelSpec judge_model;
  std::vector<prompts::DemoPair> criteria_demos;
  JudgeTemplates templates = JudgeTemplates::defaults();
};

template <typename Label>
struct Judged {
  Label label;
  std::string raw;
};

inline constexpr std::string_view kLabelOnlySuffix = "\n\nAnswer with the label only.";

// Criterion generation and the three judge calls. Every call is a fresh
// single-turn request; a label that fails to parse is retried once with
// kLabelOnlySuffix appended, then raises LabelParseError.
class Judge {
 public:
  Judge(std::shared_ptr<providers::ChatClient> criteria_client,
        std::shared_ptr<providers::ChatClient> judge_client, JudgeConfig config);

  Criterion generate_criterion(const corpus::DataPoint& dp);

  Judged<SafetyLabel> judge_safety(const Criterion& criterion, std::string_view response);
  Judged<PracticalityLabel> judge_practicality(const Criterion& criterion, std::string_view response);
  Judged<SafetyLabel> judge_safety_plain(std::string_view response);

  // Safety and practicality through two independent calls.
  Verdict judge_revision(const Criterion& criterion, std::string_view response);
  // Safety only; practicality stays empty.
  Verdict judge_plain(std::string_view response);

  providers::ChatRequest criterion_request(const corpus::DataPoint& dp) const;
  providers::ChatRequest safety_request(const Criterion& c, std::string_view response) const;
  providers::ChatRequest practicality_request(const Criterion& c, std::string_view response) const;
  providers::ChatRequest plain_request(std::string_view response) const;

  const JudgeConfig& config() const { return config_; }

 private:
  template <typename Label, typename Parse>
  Judged<Label> ask(providers::ChatRequest request, Parse parse);

  std::shared_ptr<providers::ChatClient> criteria_client_;
  std::shared_ptr<providers::ChatClient> judge_client_;
  JudgeConfig config_;
};

}  // namespace cueaudit::judging
