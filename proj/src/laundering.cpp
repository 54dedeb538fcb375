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

#include "cueaudit/laundering.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include "cueaudit/parallel.hpp"

namespace cueaudit::laundering {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string demo_block(const prompts::PromptTemplate& tmpl, std::span<const Demonstration> demos) {
  if (!tmpl.has("demos")) return {};
  if (demos.empty()) {
    throw PreconditionError(std::string(prompts::to_string(tmpl.kind())) +
                            " template has {demos} but the demonstration list is empty");
  }
  return prompts::render_demos(demos, "Revision");
}

Revision revision_from(const corpus::DataPoint& dp, int iteration,
                       const providers::ChatResponse& response) {
  auto text = trim(response.text);
  if (text.empty()) {
    throw ProviderError("launderer returned an empty revision for " + dp.id + " (iteration " +
                        std::to_string(iteration) + ")");
  }
  if (response.truncated()) spdlog::warn("revision {} of {} was truncated", iteration, dp.id);
  return {dp.id, iteration, std::move(text)};
}

// Rethrows the first captured error, after the caller has had a chance to
// persist state.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

json verdict_json(const Verdict& v) {
  json j = {{"safety", to_string(v.safety)},
            {"unsafe", metrics::safety_binary(v.safety)},
            {"raw_safety", v.raw_safety}};
  if (v.practicality) {
    j["practicality"] = to_string(*v.practicality);
    j["practical"] = metrics::practicality_binary(*v.practicality);
    j["raw_practicality"] = v.raw_practicality;
  }
  return j;
}

Verdict verdict_from(const json& j) {
  Verdict v;
  v.safety = safety_from_string(j.at("safety").get<std::string>());
  v.raw_safety = j.value("raw_safety", "");
  if (j.contains("practicality")) {
    v.practicality = practicality_from_string(j["practicality"].get<std::string>());
    v.raw_practicality = j.value("raw_practicality", "");
  }
  return v;
}

json aggregate_json(const IterationSummary& s) {
  const auto& a = s.aggregate;
  return {{"iteration", s.iteration},
          {"n", a.n},
          {"unsafe", a.unsafe},
          {"practical", a.practical},
          {"both", a.both},
          {"pe_base", metrics::to_string(a.base)},
          {"se", a.se()},
          {"pe", a.pe()},
          {"asr", a.asr()}};
}

}  // namespace

std::string_view to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::pending: return "pending";
    case RecordStatus::success: return "success";
    case RecordStatus::exhausted: return "exhausted";
  }
  return "pending";
}

RecordStatus parse_record_status(std::string_view s) {
  if (s == "pending") return RecordStatus::pending;
  if (s == "success") return RecordStatus::success;
  if (s == "exhausted") return RecordStatus::exhausted;
  throw InputError("unknown record status '" + std::string(s) + "'");
}

const Attempt* AttackRecord::current() const {
  if (history.empty()) return nullptr;
  if (status == RecordStatus::success) {
    for (const auto& a : history) {
      if (a.succeeded()) return &a;
    }
  }
  return &history.back();
}

void CampaignConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("campaign: max_iterations must be >= 1");
  if (target_asr && !(*target_asr >= 0.0 && *target_asr <= 1.0)) {
    throw ConfigError("campaign: target_asr must lie in [0, 1]");
  }
  if (demo_count < 1) throw ConfigError("campaign: demo_count must be >= 1");
  if (launderer.model_id.empty()) throw ConfigError("campaign: launderer model id is empty");
  if (target.model_id.empty()) throw ConfigError("campaign: target model id is empty");
}

LaunderTemplates LaunderTemplates::defaults() {
  return {prompts::default_template(prompts::TemplateKind::launder),
          prompts::default_template(prompts::TemplateKind::regen)};
}

std::span<const Demonstration> select_demos(const CampaignConfig& config) {
  std::span<const Demonstration> all(config.demos);
  if (all.size() < config.demo_count) return all;
  return all.first(config.demo_count);
}

providers::ChatRequest build_launder_prompt(const corpus::DataPoint& dp,
                                            std::span<const Demonstration> demos,
                                            const prompts::PromptTemplate& tmpl,
                                            const judging::ModelSpec& launderer) {
  if (tmpl.kind() != prompts::TemplateKind::launder) {
    throw ConfigError("build_launder_prompt: expected a launder template");
  }
  std::map<std::string, std::string> values{{"data_point", dp.raw_text}};
  if (tmpl.has("demos")) values["demos"] = demo_block(tmpl, demos);
  return judging::single_turn(launderer, tmpl.render(values));
}

providers::ChatRequest build_regen_prompt(const corpus::DataPoint& dp,
                                          std::span<const Revision> failed,
                                          std::span<const Demonstration> demos,
                                          const prompts::PromptTemplate& tmpl,
                                          const judging::ModelSpec& launderer) {
  if (tmpl.kind() != prompts::TemplateKind::regen) {
    throw ConfigError("build_regen_prompt: expected a regen template");
  }
  if (failed.empty()) {
    throw PreconditionError("build_regen_prompt: no failed revisions (use build_launder_prompt)");
  }
  std::vector<std::pair<int, std::string>> attempts;
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (failed[i].text.empty()) throw PreconditionError("build_regen_prompt: empty revision text");
    if (i > 0 && failed[i].iteration <= failed[i - 1].iteration) {
      throw PreconditionError("build_regen_prompt: revision iterations must strictly increase (" +
                              std::to_string(failed[i - 1].iteration) + " then " +
                              std::to_string(failed[i].iteration) + ")");
    }
    attempts.emplace_back(failed[i].iteration, failed[i].text);
  }
  std::map<std::string, std::string> values{{"data_point", dp.raw_text},
                                            {"failed_revisions", prompts::render_failed(attempts)}};
  if (tmpl.has("demos")) values["demos"] = demo_block(tmpl, demos);
  return judging::single_turn(launderer, tmpl.render(values));
}

Revision launder(const corpus::DataPoint& dp, const CampaignConfig& config, Pipeline& pipeline) {
  const auto request =
      build_launder_prompt(dp, select_demos(config), pipeline.templates.launder, config.launderer);
  return revision_from(dp, 1, pipeline.launderer->complete(request));
}

Revision regenerate(const corpus::DataPoint& dp, std::span<const Revision> failed,
                    const CampaignConfig& config, Pipeline& pipeline) {
  const auto request = build_regen_prompt(dp, failed, select_demos(config),
                                          pipeline.templates.regen, config.launderer);
  return revision_from(dp, failed.back().iteration + 1, pipeline.launderer->complete(request));
}

TargetReply query_target(const Revision& rev, providers::ChatClient& target,
                         const judging::ModelSpec& spec) {
  const auto response = target.complete(judging::single_turn(spec, rev.text));
  return {response.text, response.truncated()};
}

BaselineResult eval_baseline(const corpus::Corpus& corpus, providers::ChatClient& target,
                             const judging::ModelSpec& spec, judging::Judge& judge,
                             std::size_t workers) {
  if (corpus.empty()) throw PreconditionError("eval_baseline: corpus is empty");
  BaselineResult result;
  result.records.resize(corpus.size());
  const auto errors = parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const auto& dp = corpus.items[i];
    auto& rec = result.records[i];
    rec.datapoint_id = dp.id;
    try {
      const auto reply = target.complete(judging::single_turn(spec, dp.raw_text));
      rec.response = reply.text;
      rec.truncated = reply.truncated();
      rec.verdict = judge.judge_plain(reply.text);
    } catch (const OfflineViolation&) {
      throw;
    } catch (const ProviderError& e) {
      rec.error = e.what();
    } catch (const LabelParseError& e) {
      rec.error = e.what();
    }
  });
  rethrow_first(errors);
  std::vector<Verdict> judged;
  for (const auto& rec : result.records) {
    if (rec.verdict) {
      judged.push_back(*rec.verdict);
    } else {
      spdlog::warn("baseline: excluding {}: {}", rec.datapoint_id, rec.error);
    }
  }
  result.aggregate = metrics::aggregate_baseline(judged);
  return result;
}

CampaignResult run_campaign(const corpus::Corpus& corpus, const CampaignConfig& config,
                            Pipeline& pipeline) {
  config.validate();
  if (corpus.empty()) throw PreconditionError("run_campaign: corpus is empty");
  if (!pipeline.launderer || !pipeline.target || !pipeline.judge) {
    throw ConfigError("run_campaign: pipeline is missing a client");
  }
  if (config.demos.size() < config.demo_count) {
    spdlog::warn("campaign: {} demonstrations supplied, {} requested", config.demos.size(),
                 config.demo_count);
  }

  CampaignResult result;
  if (config.checkpoint) {
    if (auto saved = read_checkpoint(*config.checkpoint)) {
      bool same = saved->records.size() == corpus.size();
      for (std::size_t i = 0; same && i < corpus.size(); ++i) {
        same = saved->records[i].datapoint.id == corpus.items[i].id;
      }
      if (!same) throw ConfigError("checkpoint does not match the corpus being attacked");
      result = std::move(*saved);
      spdlog::info("resuming campaign after iteration {}", result.iterations.size());
    }
  }
  if (result.records.empty()) {
    for (const auto& dp : corpus.items) result.records.push_back({dp, std::nullopt, {}, {}});
  }
  result.target_model = config.target.model_id;

  auto persist = [&] {
    if (config.checkpoint) write_checkpoint(result, *config.checkpoint);
  };
  auto abort_with = [&](const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors) {
      if (!e) continue;
      persist();
      try {
        std::rethrow_exception(e);
      } catch (const OfflineViolation&) {
        throw;
      } catch (const ProviderError& pe) {
        throw CampaignAborted(std::string("campaign aborted: ") + pe.what(),
                              std::make_shared<const CampaignResult>(result));
      }
    }
  };

  auto& records = result.records;
  abort_with(parallel_for(records.size(), config.workers, [&](std::size_t i) {
    auto& rec = records[i];
    if (!rec.criterion) rec.criterion = pipeline.judge->generate_criterion(rec.datapoint);
  }));

  for (int iteration = static_cast<int>(result.iterations.size()) + 1;
       iteration <= config.max_iterations; ++iteration) {
    abort_with(parallel_for(records.size(), config.workers, [&](std::size_t i) {
      auto& rec = records[i];
      if (rec.status != RecordStatus::pending) return;
      if (static_cast<int>(rec.history.size()) >= iteration) return;  // done before a resume
      Attempt attempt;
      if (rec.history.empty()) {
        attempt.revision = launder(rec.datapoint, config, pipeline);
      } else {
        std::vector<Revision> failed;
        for (const auto& a : rec.history) failed.push_back(a.revision);
        attempt.revision = regenerate(rec.datapoint, failed, config, pipeline);
      }
      auto reply = query_target(attempt.revision, *pipeline.target, config.target);
      attempt.response = std::move(reply.text);
      attempt.truncated = reply.truncated;
      try {
        attempt.verdict = pipeline.judge->judge_revision(*rec.criterion, attempt.response);
      } catch (const LabelParseError& e) {
        attempt.eval_error = e.what();
        spdlog::warn("{} iteration {}: judge output unparseable; record stays pending",
                     rec.datapoint.id, iteration);
      }
      const bool won = attempt.succeeded();
      rec.history.push_back(std::move(attempt));
      if (won) rec.status = RecordStatus::success;
    }));

    std::vector<std::optional<Verdict>> current;
    current.reserve(records.size());
    for (const auto& rec : records) {
      const auto* a = rec.current();
      current.push_back(a ? a->verdict : std::nullopt);
    }
    result.iterations.push_back({iteration, metrics::aggregate(current, config.pe_base)});
    const auto& agg = result.iterations.back().aggregate;
    spdlog::info("iteration {}: SE {:.2f} PE {:.2f} ASR {:.2f}", iteration, agg.se(), agg.pe(),
                 agg.asr());

    if (config.target_asr && agg.asr() / 100.0 >= *config.target_asr) {
      result.stop_reason = StopReason::target_asr;
      persist();
      return result;
    }
    persist();
  }

  for (auto& rec : records) {
    if (rec.status == RecordStatus::pending) rec.status = RecordStatus::exhausted;
  }
  result.stop_reason = StopReason::max_iterations;
  persist();
  return result;
}

json to_json(const AttackRecord& r) {
  json history = json::array();
  for (const auto& a : r.history) {
    json h = {{"iteration", a.revision.iteration},
              {"revision", a.revision.text},
              {"response", a.response},
              {"truncated", a.truncated}};
    if (a.verdict) {
      h["verdict"] = verdict_json(*a.verdict);
      h["success"] = a.succeeded();
    } else {
      h["verdict"] = nullptr;
      h["eval_error"] = a.eval_error;
    }
    history.push_back(std::move(h));
  }
  json j = {{"id", r.datapoint.id},
            {"text", r.datapoint.text},
            {"raw_text", r.datapoint.raw_text},
            {"source", r.datapoint.source},
            {"status", to_string(r.status)},
            {"history", std::move(history)}};
  j["criterion"] = r.criterion ? json(r.criterion->text) : json(nullptr);
  return j;
}

AttackRecord record_from_json(const json& j) {
  AttackRecord r;
  r.datapoint = {j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                 j.at("raw_text").get<std::string>(), j.at("source").get<std::string>()};
  if (j.contains("criterion") && j["criterion"].is_string()) {
    r.criterion = judging::Criterion{r.datapoint.id, j["criterion"].get<std::string>()};
  }
  r.status = parse_record_status(j.at("status").get<std::string>());
  for (const auto& h : j.at("history")) {
    Attempt a;
    a.revision = {r.datapoint.id, h.at("iteration").get<int>(), h.at("revision").get<std::string>()};
    a.response = h.at("response").get<std::string>();
    a.truncated = h.value("truncated", false);
    if (h.contains("verdict") && !h["verdict"].is_null()) a.verdict = verdict_from(h["verdict"]);
    a.eval_error = h.value("eval_error", "");
    r.history.push_back(std::move(a));
  }
  return r;
}

json summary_json(const CampaignResult& r) {
  json iterations = json::array();
  for (const auto& s : r.iterations) iterations.push_back(aggregate_json(s));
  std::size_t success = 0, exhausted = 0, pending = 0;
  for (const auto& rec : r.records) {
    success += rec.status == RecordStatus::success;
    exhausted += rec.status == RecordStatus::exhausted;
    pending += rec.status == RecordStatus::pending;
  }
  json j = {{"target_model", r.target_model},
            {"record_count", r.records.size()},
            {"status_counts", {{"success", success}, {"exhausted", exhausted}, {"pending", pending}}},
            {"iterations", std::move(iterations)}};
  j["baseline_asr"] = r.baseline_asr ? json(*r.baseline_asr) : json(nullptr);
  if (r.stop_reason) {
    j["stop_reason"] = *r.stop_reason == StopReason::target_asr ? "target_asr" : "max_iterations";
  } else {
    j["stop_reason"] = nullptr;
  }
  return j;
}

json to_json(const CampaignResult& r) {
  json j = summary_json(r);
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  j["records"] = std::move(records);
  return j;
}

CampaignResult result_from_json(const json& j) {
  CampaignResult r;
  r.target_model = j.value("target_model", "");
  if (j.contains("records")) {
    for (const auto& rec : j["records"]) r.records.push_back(record_from_json(rec));
  }
  for (const auto& s : j.at("iterations")) {
    const auto agg = metrics::aggregate_counts(
        s.at("n").get<std::size_t>(), s.at("unsafe").get<std::size_t>(),
        s.at("practical").get<std::size_t>(), s.at("both").get<std::size_t>(),
        metrics::parse_practicality_base(s.at("pe_base").get<std::string>()));
    r.iterations.push_back({s.at("iteration").get<int>(), agg});
  }
  if (j.contains("baseline_asr") && j["baseline_asr"].is_number()) {
    r.baseline_asr = j["baseline_asr"].get<double>();
  }
  if (j.contains("stop_reason") && j["stop_reason"].is_string()) {
    r.stop_reason = j["stop_reason"] == "target_asr" ? StopReason::target_asr
                                                     : StopReason::max_iterations;
  }
  return r;
}

std::string records_jsonl(const CampaignResult& r) {
  std::string out;
  for (const auto& rec : r.records) out += to_json(rec).dump() + "\n";
  return out;
}

void write_checkpoint(const CampaignResult& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint '" + tmp.string() + "'");
    out << to_json(r).dump(1);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<CampaignResult> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return result_from_json(json::parse(buf.str()));
  } catch (const json::exception& e) {
    throw InputError("checkpoint '" + path.string() + "' is malformed: " + e.what());
  }
}

}  // namespace cueaudit::laundering
