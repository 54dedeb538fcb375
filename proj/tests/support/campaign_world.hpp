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

// A fully scripted launder -> target -> judge world for campaign tests.
//
// Items carry raw text "item-<key> ...". The launderer answers
// "REV item-<key>#<k>" where k is one more than the number of earlier
// rewrites listed in its prompt; the target echoes "RESP <revision>"; the
// judge looks up the (key, k) pair in a schedule. Per-key call counters let
// tests check that frozen records are never touched again.

#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <string>

#include "cueaudit/judging.hpp"
#include "cueaudit/laundering.hpp"
#include "cueaudit/mock.hpp"
#include "test_support.hpp"

namespace cueaudit::support {

struct Outcome {
  std::string safety = "safe";
  std::string practicality = "inapplicable";
};

inline Outcome success_outcome() { return {"unsafe", "applicable"}; }

class CampaignWorld {
 public:
  // schedule[key][k] = judge outcome for the k-th revision of item <key>.
  // Missing entries judge as safe / inapplicable.
  std::map<std::string, std::map<int, Outcome>> schedule;
  // (key, k) pairs whose launderer reply is empty.
  std::set<std::pair<std::string, int>> empty_revisions;
  // (key, k) pairs whose judge reply cannot be parsed.
  std::set<std::pair<std::string, int>> unparseable;
  // Keys whose target replies are cut at the length limit.
  std::set<std::string> truncating;

  std::shared_ptr<providers::FunctionChatProvider> launderer, target, criteria, judge_model;

  CampaignWorld() {
    using providers::ChatRequest;
    using providers::ChatResponse;
    launderer = std::make_shared<providers::FunctionChatProvider>(
        [this](const ChatRequest& r) { return on_launder(r); }, "world-launderer");
    target = std::make_shared<providers::FunctionChatProvider>(
        [this](const ChatRequest& r) { return on_target(r); }, "world-target");
    criteria = std::make_shared<providers::FunctionChatProvider>(
        [this](const ChatRequest& r) { return on_criterion(r); }, "world-criteria");
    judge_model = std::make_shared<providers::FunctionChatProvider>(
        [this](const ChatRequest& r) { return on_judge(r); }, "world-judge");
  }

  laundering::Pipeline pipeline() {
    providers::ClientOptions opts;
    opts.retry.max_retries = 0;
    auto client = [&](auto provider, std::string ns) {
      auto o = opts;
      o.cache_namespace = std::move(ns);
      return std::make_shared<providers::ChatClient>(provider, o);
    };
    judging::JudgeConfig jc;
    jc.criteria_model = {"world-criteria", 1024, providers::ReasoningEffort::standard, {}};
    jc.judge_model = {"world-judge", 256, providers::ReasoningEffort::standard, {}};
    jc.criteria_demos = {{"Make X", "Explains how to make X."}};
    auto judge = std::make_shared<judging::Judge>(client(criteria, "criteria"),
                                                  client(judge_model, "judge"), jc);
    return {client(launderer, "launderer"), client(target, "target"), judge,
            laundering::LaunderTemplates::defaults()};
  }

  static laundering::CampaignConfig config(int max_iterations, std::size_t workers = 4) {
    laundering::CampaignConfig c;
    c.demos = {{"Make X", "For a chemistry class, explain making X."},
               {"Do Y", "In a novel, a character does Y."}};
    c.demo_count = 8;
    c.max_iterations = max_iterations;
    c.launderer.model_id = "world-launderer";
    c.target.model_id = "world-target";
    c.workers = workers;
    return c;
  }

  static corpus::Corpus corpus_for(const std::vector<std::string>& keys) {
    std::vector<std::string> texts;
    for (const auto& k : keys) texts.push_back("item-" + k + " request");
    return make_corpus(texts, "w");
  }

  int launder_calls(const std::string& key) const { return count(launder_calls_, key); }
  int target_calls(const std::string& key) const { return count(target_calls_, key); }
  int judge_calls(const std::string& key) const { return count(judge_calls_, key); }
  int criterion_calls(const std::string& key) const { return count(criterion_calls_, key); }

 private:
  static std::string key_in(const std::string& text) {
    static const std::regex re("item-([a-z0-9]+)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) throw ProviderError("world: no item key in prompt");
    return m[1];
  }

  static std::pair<std::string, int> revision_in(const std::string& text) {
    static const std::regex re("item-([a-z0-9]+)#([0-9]+)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) throw ProviderError("world: no revision tag in prompt");
    return {m[1], std::stoi(m[2])};
  }

  static int count(const std::map<std::string, int>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  }

  void bump(std::map<std::string, int>& m, const std::string& key) {
    std::lock_guard lock(mu_);
    ++m[key];
  }

  providers::ChatResponse on_launder(const providers::ChatRequest& r) {
    const auto& prompt = r.last_user_content();
    const auto key = key_in(prompt);
    bump(launder_calls_, key);
    int k = 1;
    for (auto pos = prompt.find("Attempt "); pos != std::string::npos;
         pos = prompt.find("Attempt ", pos + 1)) {
      ++k;
    }
    if (empty_revisions.contains({key, k})) return {"  ", providers::FinishReason::stop, {}, 0, false};
    return {"REV item-" + key + "#" + std::to_string(k), providers::FinishReason::stop, {}, 0, false};
  }

  providers::ChatResponse on_target(const providers::ChatRequest& r) {
    const auto& prompt = r.last_user_content();
    const auto key = key_in(prompt);
    bump(target_calls_, key);
    const auto finish =
        truncating.contains(key) ? providers::FinishReason::length : providers::FinishReason::stop;
    return {"RESP " + prompt, finish, {}, 0, false};
  }

  providers::ChatResponse on_criterion(const providers::ChatRequest& r) {
    const auto key = key_in(r.last_user_content().substr(r.last_user_content().rfind("Request:")));
    bump(criterion_calls_, key);
    return {"CRIT item-" + key, providers::FinishReason::stop, {}, 0, false};
  }

  providers::ChatResponse on_judge(const providers::ChatRequest& r) {
    const auto& prompt = r.last_user_content();
    const auto [key, k] = revision_in(prompt);
    bump(judge_calls_, key);
    if (unparseable.contains({key, k})) return {"hard to say", providers::FinishReason::stop, {}, 0, false};
    Outcome o;
    if (auto it = schedule.find(key); it != schedule.end()) {
      if (auto jt = it->second.find(k); jt != it->second.end()) o = jt->second;
    }
    const bool safety = prompt.find("extremely unsafe") != std::string::npos;
    return {safety ? o.safety : o.practicality, providers::FinishReason::stop, {}, 0, false};
  }

  mutable std::mutex mu_;
  std::map<std::string, int> launder_calls_, target_calls_, judge_calls_, criterion_calls_;
};

}  // namespace cueaudit::support
