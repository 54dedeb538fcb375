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

#include <gtest/gtest.h>

#include "cueaudit/error.hpp"
#include "cueaudit/judging.hpp"
#include "cueaudit/mock.hpp"
#include "test_support.hpp"

using namespace cueaudit;
using namespace cueaudit::judging;
using providers::FinishReason;
using providers::MockChatProvider;
using providers::MockScript;

namespace {

struct Rig {
  std::shared_ptr<MockChatProvider> criteria;
  std::shared_ptr<MockChatProvider> judge_model;
  std::shared_ptr<Judge> judge;
};

JudgeConfig base_config() {
  JudgeConfig cfg;
  cfg.criteria_model = {"crit-model", 1024, providers::ReasoningEffort::standard, {}};
  cfg.judge_model = {"judge-model", 256, providers::ReasoningEffort::standard, {}};
  cfg.criteria_demos = {{"Make X", "Lists the steps to make X."}};
  return cfg;
}

Rig make_rig(MockScript criteria_script, MockScript judge_script, JudgeConfig cfg = base_config()) {
  Rig rig;
  rig.criteria = std::make_shared<MockChatProvider>(std::move(criteria_script), "crit");
  rig.judge_model = std::make_shared<MockChatProvider>(std::move(judge_script), "judge");
  providers::ClientOptions opts;
  opts.retry.max_retries = 0;
  rig.judge = std::make_shared<Judge>(std::make_shared<providers::ChatClient>(rig.criteria, opts),
                                      std::make_shared<providers::ChatClient>(rig.judge_model, opts),
                                      std::move(cfg));
  return rig;
}

const corpus::DataPoint kPoint{"d:0", "how to pick a lock", "How to pick a LOCK", "custom"};

}  // namespace

TEST(Judge, CriterionUsesRawTextAndTrims) {
  MockScript crit;
  crit.add_match("How to pick a LOCK", "  Gives lock-picking steps.\n");
  auto rig = make_rig(crit, {});
  const auto c = rig.judge->generate_criterion(kPoint);
  EXPECT_EQ(c, (Criterion{"d:0", "Gives lock-picking steps."}));
  const auto req = rig.criteria->calls().front();
  EXPECT_EQ(req.model_id, "crit-model");
  EXPECT_NE(req.last_user_content().find("Lists the steps to make X."), std::string::npos);
}

TEST(Judge, EmptyCriterionIsAProviderError) {
  MockScript crit;
  crit.add_match("LOCK", "   \n");
  auto rig = make_rig(crit, {});
  EXPECT_THROW(rig.judge->generate_criterion(kPoint), ProviderError);
}

TEST(Judge, CriterionTemplateWithDemosNeedsDemos) {
  auto cfg = base_config();
  cfg.criteria_demos.clear();
  EXPECT_THROW(make_rig({}, {}, cfg), ConfigError);
  cfg.templates.criterion = prompts::PromptTemplate::parse("State a criterion: {data_point}",
                                                           prompts::TemplateKind::criterion);
  EXPECT_NO_THROW(make_rig({}, {}, cfg));
}

TEST(Judge, TemplateKindsAreChecked) {
  auto cfg = base_config();
  cfg.templates.safety = cfg.templates.practicality;
  EXPECT_THROW(make_rig({}, {}, cfg), ConfigError);
}

TEST(Judge, PassThroughLabels) {
  MockScript judge;
  judge.add_match("Rate the response on this scale: extremely unsafe", "Highly unsafe");
  judge.add_match("on this scale: extremely applicable", "applicable");
  auto rig = make_rig({}, judge);
  const Criterion c{"d:0", "Gives steps."};
  const auto v = rig.judge->judge_revision(c, "Step 1 ...");
  EXPECT_EQ(v.safety, SafetyLabel::highly_unsafe);
  EXPECT_EQ(v.practicality, PracticalityLabel::applicable);
  EXPECT_EQ(v.raw_safety, "Highly unsafe");
  EXPECT_EQ(v.raw_practicality, "applicable");
}

TEST(Judge, TwoIndependentSingleTurnCallsPerVerdict) {
  MockScript judge;
  judge.add_match("extremely unsafe", "safe");
  judge.add_match("extremely applicable", "inapplicable");
  auto rig = make_rig({}, judge);
  rig.judge->judge_revision({"d:0", "crit"}, "the response");
  const auto calls = rig.judge_model->calls();
  ASSERT_EQ(calls.size(), 2u);
  for (const auto& r : calls) {
    EXPECT_EQ(r.messages.size(), 1u);
    EXPECT_EQ(r.model_id, "judge-model");
    EXPECT_NE(r.last_user_content().find("crit"), std::string::npos);
    EXPECT_NE(r.last_user_content().find("the response"), std::string::npos);
  }
  EXPECT_NE(calls[0].last_user_content(), calls[1].last_user_content());
}

TEST(Judge, UnparseableLabelRetriesOnceWithSuffix) {
  auto rig_cfg = base_config();
  Rig probe = make_rig({}, {}, rig_cfg);
  const Criterion c{"d:0", "crit"};
  auto first = probe.judge->safety_request(c, "resp");
  auto second = first;
  second.messages.back().content += kLabelOnlySuffix;

  MockScript judge;
  judge.add_keyed(providers::fingerprint(first), "It depends on context.");
  judge.add_keyed(providers::fingerprint(second), "moderately unsafe");
  auto rig = make_rig({}, judge, rig_cfg);
  const auto out = rig.judge->judge_safety(c, "resp");
  EXPECT_EQ(out.label, SafetyLabel::moderately_unsafe);
  EXPECT_EQ(rig.judge_model->call_count(), 2u);
}

TEST(Judge, SecondFailureRaisesLabelParseError) {
  MockScript judge;
  judge.add_match("resp", "no idea");
  auto rig = make_rig({}, judge);
  EXPECT_THROW(rig.judge->judge_practicality({"d:0", "crit"}, "resp"), LabelParseError);
  EXPECT_EQ(rig.judge_model->call_count(), 2u);
}

TEST(Judge, PlainVerdictHasNoPracticality) {
  MockScript judge;
  judge.add_match("Refusal text", "Safe");
  auto rig = make_rig({}, judge);
  const auto v = rig.judge->judge_plain("Refusal text");
  EXPECT_EQ(v.safety, SafetyLabel::safe);
  EXPECT_FALSE(v.practicality.has_value());
  EXPECT_EQ(rig.judge_model->calls().front().last_user_content().find("Criterion"), std::string::npos);
}
