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

#include "cueaudit/judging.hpp"

#include <spdlog/spdlog.h>

#include "cueaudit/error.hpp"

namespace cueaudit::judging {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

providers::ChatRequest single_turn(const ModelSpec& model, std::string prompt) {
  providers::ChatRequest r;
  r.model_id = model.model_id;
  r.messages.push_back({providers::Role::user, std::move(prompt)});
  r.max_output_tokens = model.max_output_tokens;
  r.reasoning_effort = model.effort;
  r.sampling = model.sampling;
  return r;
}

JudgeTemplates JudgeTemplates::defaults() {
  using prompts::TemplateKind;
  return {prompts::default_template(TemplateKind::criterion),
          prompts::default_template(TemplateKind::judge_safety),
          prompts::default_template(TemplateKind::judge_practicality),
          prompts::default_template(TemplateKind::judge_plain)};
}

Judge::Judge(std::shared_ptr<providers::ChatClient> criteria_client,
             std::shared_ptr<providers::ChatClient> judge_client, JudgeConfig config)
    : criteria_client_(std::move(criteria_client)),
      judge_client_(std::move(judge_client)),
      config_(std::move(config)) {
  if (!criteria_client_ || !judge_client_) throw ConfigError("Judge: null client");
  using prompts::TemplateKind;
  if (config_.templates.criterion.kind() != TemplateKind::criterion ||
      config_.templates.safety.kind() != TemplateKind::judge_safety ||
      config_.templates.practicality.kind() != TemplateKind::judge_practicality ||
      config_.templates.plain.kind() != TemplateKind::judge_plain) {
    throw ConfigError("Judge: template kinds do not match their roles");
  }
  if (config_.templates.criterion.has("demos") && config_.criteria_demos.empty()) {
    throw ConfigError("criterion template has {demos} but no criterion demonstrations were given");
  }
}

providers::ChatRequest Judge::criterion_request(const corpus::DataPoint& dp) const {
  std::map<std::string, std::string> values{{"data_point", dp.raw_text}};
  if (config_.templates.criterion.has("demos")) {
    values["demos"] = prompts::render_demos(config_.criteria_demos, "Criterion");
  }
  return single_turn(config_.criteria_model, config_.templates.criterion.render(values));
}

providers::ChatRequest Judge::safety_request(const Criterion& c, std::string_view response) const {
  return single_turn(config_.judge_model,
                     config_.templates.safety.render(
                         {{"criterion", c.text}, {"response", std::string(response)}}));
}

providers::ChatRequest Judge::practicality_request(const Criterion& c,
                                                   std::string_view response) const {
  return single_turn(config_.judge_model,
                     config_.templates.practicality.render(
                         {{"criterion", c.text}, {"response", std::string(response)}}));
}

providers::ChatRequest Judge::plain_request(std::string_view response) const {
  return single_turn(config_.judge_model,
                     config_.templates.plain.render({{"response", std::string(response)}}));
}

Criterion Judge::generate_criterion(const corpus::DataPoint& dp) {
  const auto response = criteria_client_->complete(criterion_request(dp));
  auto text = trim(response.text);
  if (text.empty()) throw ProviderError("criteria model returned an empty criterion for " + dp.id);
  if (response.truncated()) spdlog::warn("criterion for {} was truncated", dp.id);
  return {dp.id, std::move(text)};
}

template <typename Label, typename Parse>
Judged<Label> Judge::ask(providers::ChatRequest request, Parse parse) {
  auto first = judge_client_->complete(request);
  try {
    return {parse(first.text), first.text};
  } catch (const LabelParseError& e) {
    spdlog::debug("judge label unparseable, retrying once: {}", e.what());
  }
  request.messages.back().content += kLabelOnlySuffix;
  auto second = judge_client_->complete(request);
  return {parse(second.text), second.text};
}

Judged<SafetyLabel> Judge::judge_safety(const Criterion& criterion, std::string_view response) {
  return ask<SafetyLabel>(safety_request(criterion, response), parse_safety_label);
}

Judged<PracticalityLabel> Judge::judge_practicality(const Criterion& criterion,
                                                    std::string_view response) {
  return ask<PracticalityLabel>(practicality_request(criterion, response), parse_practicality_label);
}

Judged<SafetyLabel> Judge::judge_safety_plain(std::string_view response) {
  return ask<SafetyLabel>(plain_request(response), parse_safety_label);
}

Verdict Judge::judge_revision(const Criterion& criterion, std::string_view response) {
  auto s = judge_safety(criterion, response);
  auto p = judge_practicality(criterion, response);
  return {s.label, p.label, std::move(s.raw), std::move(p.raw)};
}

Verdict Judge::judge_plain(std::string_view response) {
  auto s = judge_safety_plain(response);
  return {s.label, std::nullopt, std::move(s.raw), {}};
}

}  // namespace cueaudit::judging
