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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cueaudit/config.hpp"
#include "cueaudit/corpus.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/hashing.hpp"
#include "cueaudit/laundering.hpp"
#include "cueaudit/metrics.hpp"
#include "cueaudit/report.hpp"
#include "cueaudit/similarity.hpp"
#include "cueaudit/textstats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cueaudit;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 20240229;
  std::string cache_dir;
  bool offline = false;
  std::string out_root = "runs";
  bool verbose = false;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open '" + p.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << content;
}

// Owns the run directory: hashes the command, its options, the config and
// the input file contents, then writes the manifest before any artifact.
class Run {
 public:
  Run(const Globals& g, std::string command, json options, const std::vector<fs::path>& inputs)
      : settings_(g.config_path.empty() ? config::default_settings()
                                        : config::load_settings(g.config_path)) {
    manifest_.body = {{"tool", "cueaudit"},
                      {"command", std::move(command)},
                      {"options", std::move(options)},
                      {"seed", g.seed},
                      {"offline", g.offline},
                      {"config", settings_.raw}};
    json in = json::array();
    for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", sha256_hex(read_text(p))}});
    manifest_.body["inputs"] = std::move(in);
    manifest_.timestamp = report::utc_timestamp();
    dir_ = fs::path(g.out_root) / manifest_.short_hash();
    fs::create_directories(dir_);
    write_text(dir_ / "manifest.json", manifest_.dump());

    config::RegistryOptions ro;
    if (!g.cache_dir.empty()) ro.cache_dir = g.cache_dir;
    ro.offline = g.offline;
    ro.seed = g.seed;
    registry_ = std::make_unique<config::Registry>(settings_, ro);
  }

  const fs::path& dir() const { return dir_; }
  std::string hash() const { return manifest_.hash(); }
  config::Registry& registry() { return *registry_; }
  const config::Settings& settings() const { return settings_; }

  void emit(const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    spdlog::info("wrote {}", (dir_ / name).string());
  }

 private:
  config::Settings settings_;
  report::Manifest manifest_;
  fs::path dir_;
  std::unique_ptr<config::Registry> registry_;
};

corpus::Corpus load_corpora(const std::vector<std::string>& paths, const std::string& name) {
  std::vector<corpus::Corpus> parts;
  for (const auto& p : paths) parts.push_back(corpus::read_serialized(p));
  if (parts.size() == 1 && name.empty()) return parts.front();
  return corpus::concat(parts, name.empty() ? "combined" : name);
}

std::vector<fs::path> as_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

similarity::SimilarityMatrix embed_and_compare(Run& run, const corpus::Corpus& c) {
  auto client = run.registry().embedding_client();
  const auto vectors = similarity::embed_corpus(c, *client);
  return similarity::pairwise_cosine(vectors);
}

void print_run_dir(const Run& run) { std::cout << run.dir().string() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("cueaudit"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Dataset audit and attack-campaign toolkit for safety benchmarks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master RNG seed");
  app.add_option("--cache-dir", g.cache_dir, "Response cache directory");
  app.add_flag("--offline", g.offline, "Refuse every network call");
  app.add_option("--out", g.out_root, "Root directory for run outputs");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a dataset file into a normalized corpus");
  std::vector<std::string> ingest_inputs;
  std::string preset, format, field, name, source, filter;
  std::size_t subsample_n = 0;
  bool do_subsample = false;
  ingest->add_option("inputs", ingest_inputs, "Dataset files")->required()->check(CLI::ExistingFile);
  ingest->add_option("--preset", preset, "advbench | harmbench | gsm8k");
  ingest->add_option("--format", format, "csv | jsonl | lines");
  ingest->add_option("--field", field, "Column or key holding the text");
  ingest->add_option("--name", name, "Corpus name (id prefix)");
  ingest->add_option("--source", source, "Source tag");
  ingest->add_option("--filter", filter, "column=value row filter (csv)");
  auto* sub_opt = ingest->add_option("--subsample", subsample_n, "Seeded subsample size");

  // ngrams
  auto* ngrams = app.add_subcommand("ngrams", "Top-k n-gram tables with cue tags");
  std::vector<std::string> corpora;
  std::string combined_name, lexicon_path, stopwords_path, instruction_path;
  std::size_t k = 0;
  std::vector<std::size_t> orders;
  bool keep_punct = false;
  ngrams->add_option("--corpus", corpora, "Serialized corpus (repeatable)")->required()->check(CLI::ExistingFile);
  ngrams->add_option("--name", combined_name, "Name of the combined corpus");
  ngrams->add_option("-k", k, "Phrases per order");
  ngrams->add_option("--orders", orders, "n-gram orders");
  ngrams->add_option("--lexicon", lexicon_path, "Cue lexicon (phrase<TAB>category)");
  ngrams->add_option("--stopwords", stopwords_path, "Stopword list");
  ngrams->add_option("--instruction-words", instruction_path, "Instruction word list");
  ngrams->add_flag("--keep-punctuation", keep_punct, "Do not strip punctuation");

  // dedup / representatives / sweep
  double threshold = -1.0;
  auto* dedup = app.add_subcommand("dedup", "Embed, compare and partition a corpus");
  dedup->add_option("--corpus", corpora, "Serialized corpus (repeatable)")->required()->check(CLI::ExistingFile);
  dedup->add_option("--name", combined_name, "Name of the combined corpus");
  dedup->add_option("--threshold", threshold, "Similarity threshold");

  auto* reps = app.add_subcommand("representatives", "Keep uniques plus one member per duplicate group");
  reps->add_option("--corpus", corpora, "Serialized corpus (repeatable)")->required()->check(CLI::ExistingFile);
  reps->add_option("--name", combined_name, "Name of the combined corpus");
  reps->add_option("--threshold", threshold, "Similarity threshold");

  auto* sweep = app.add_subcommand("sweep", "Unique/duplicate fractions over a threshold grid");
  std::vector<std::string> baseline_corpora;
  int lo = -1, hi = -1, step = -1;
  sweep->add_option("--corpus", corpora, "Serialized corpus (repeatable)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--name", combined_name, "Name of the combined corpus");
  sweep->add_option("--baseline-corpus", baseline_corpora, "Size-matched comparison corpus")->check(CLI::ExistingFile);
  sweep->add_option("--lo", lo, "Lowest threshold in hundredths");
  sweep->add_option("--hi", hi, "Highest threshold in hundredths");
  sweep->add_option("--step", step, "Step in hundredths");

  // baseline / campaign
  std::string target_name;
  auto* baseline = app.add_subcommand("baseline", "No-revision ASR of a target model");
  baseline->add_option("--corpus", corpora, "Serialized corpus")->required()->check(CLI::ExistingFile);
  baseline->add_option("--target", target_name, "Target name from the config");

  auto* campaign = app.add_subcommand("campaign", "Revision-regeneration attack campaign");
  int max_iterations = 0;
  double target_asr = -1.0;
  bool with_baseline = false;
  campaign->add_option("--corpus", corpora, "Serialized corpus")->required()->check(CLI::ExistingFile);
  campaign->add_option("--target", target_name, "Target name from the config");
  campaign->add_option("--max-iterations", max_iterations, "Iteration cap");
  campaign->add_option("--target-asr", target_asr, "Stop once ASR reaches this fraction");
  campaign->add_flag("--with-baseline", with_baseline, "Also measure the no-revision ASR");

  // agree
  auto* agree = app.add_subcommand("agree", "LLM/human agreement with a bootstrap CI");
  std::string agree_input;
  std::size_t resamples = 10000;
  double level = 0.95;
  agree->add_option("input", agree_input, "CSV: item_id,llm_binary,human1,...")->required()->check(CLI::ExistingFile);
  agree->add_option("--resamples", resamples, "Bootstrap resamples");
  agree->add_option("--level", level, "Confidence level");

  // report
  auto* rep = app.add_subcommand("report", "Table of campaign summaries with a Mean row");
  std::vector<std::string> summaries;
  std::string mean_rule;
  rep->add_option("summaries", summaries, "summary.json files, optionally label=path")->required();
  rep->add_option("--mean-rule", mean_rule, "se_times_pe | arithmetic");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*ingest) {
      corpus::LoadOptions base;
      if (!preset.empty()) base = corpus::preset(preset);
      if (!format.empty()) base.format = corpus::parse_format(format);
      if (!field.empty()) base.field = field;
      if (!source.empty()) base.source = source;
      if (!filter.empty()) {
        const auto eq = filter.find('=');
        if (eq == std::string::npos) throw ConfigError("--filter expects column=value");
        base.filter = corpus::RowFilter{filter.substr(0, eq), filter.substr(eq + 1)};
      }
      do_subsample = sub_opt->count() > 0;
      json opts = {{"preset", preset}, {"format", format}, {"field", field}, {"name", name},
                   {"source", source}, {"filter", filter}};
      if (do_subsample) opts["subsample"] = subsample_n;
      Run run(g, "ingest", opts, as_paths(ingest_inputs));
      std::vector<corpus::Corpus> parts;
      for (const auto& in : ingest_inputs) {
        auto o = base;
        if (ingest_inputs.size() == 1) o.name = name;
        parts.push_back(corpus::load_corpus(in, o));
      }
      auto c = parts.size() == 1 ? parts.front() : corpus::concat(parts, name.empty() ? "combined" : name);
      if (do_subsample) c = corpus::subsample(c, subsample_n, g.seed);
      run.emit("corpus.jsonl", corpus::to_jsonl(c));
      spdlog::info("{} items", c.size());
      print_run_dir(run);
    } else if (*ngrams) {
      Run run(g, "ngrams", {{"name", combined_name}, {"k", k}, {"orders", orders},
                            {"lexicon", lexicon_path}, {"stopwords", stopwords_path},
                            {"instruction_words", instruction_path}, {"keep_punctuation", keep_punct}},
              as_paths(corpora));
      const auto& ns = run.settings().ngrams;
      textstats::FilterConfig filt = textstats::default_filter();
      if (!stopwords_path.empty()) filt.stopwords = textstats::load_word_list(stopwords_path);
      else if (ns.stopwords) filt.stopwords = textstats::load_word_list(*ns.stopwords);
      if (!instruction_path.empty()) filt.instruction_words = textstats::load_word_list(instruction_path);
      else if (ns.instruction_words) filt.instruction_words = textstats::load_word_list(*ns.instruction_words);
      filt.strip_punctuation = !keep_punct;
      textstats::CueLexicon lex;
      if (!lexicon_path.empty()) lex = textstats::load_lexicon(lexicon_path);
      else if (ns.lexicon) lex = textstats::load_lexicon(*ns.lexicon);
      const auto c = load_corpora(corpora, combined_name);
      std::vector<textstats::NGramTable> tables;
      for (auto n : orders.empty() ? ns.orders : orders) tables.push_back(textstats::extract_ngrams(c, n, filt));
      const auto sections = report::ngram_sections(tables, lex, k ? k : ns.k);
      run.emit("ngrams.csv", report::render_ngrams_csv(sections, run.hash()));
      run.emit("ngrams.json", report::render_ngrams_json(sections, run.hash()));
      print_run_dir(run);
    } else if (*dedup || *reps) {
      const bool select = reps->parsed();
      Run run(g, select ? "representatives" : "dedup", {{"name", combined_name}, {"threshold", threshold}},
              as_paths(corpora));
      const double theta = threshold > 0 ? threshold : run.settings().dedup.threshold;
      const auto c = load_corpora(corpora, combined_name);
      const auto m = embed_and_compare(run, c);
      std::vector<std::string> ids;
      for (const auto& dp : c.items) ids.push_back(dp.id);
      const auto partition = similarity::partition_at(m, theta, ids);
      auto pj = json::parse(similarity::partition_json(partition));
      pj["manifest"] = run.hash();
      run.emit("partition.json", pj.dump(2) + "\n");
      if (select) {
        const auto kept = similarity::select_representatives(partition, c, g.seed);
        run.emit("representatives.jsonl", corpus::to_jsonl(kept));
        spdlog::info("{} of {} items kept", kept.size(), c.size());
      } else {
        similarity::write_binary(m, run.dir() / "similarity.bin");
        run.emit("similarity.csv", report::csv_manifest_line(run.hash()) + similarity::to_triples_csv(m));
        spdlog::info("{} groups, {} uniques", partition.groups.size(), partition.uniques.size());
      }
      print_run_dir(run);
    } else if (*sweep) {
      std::vector<std::string> all_inputs = corpora;
      all_inputs.insert(all_inputs.end(), baseline_corpora.begin(), baseline_corpora.end());
      Run run(g, "sweep", {{"name", combined_name}, {"baseline", baseline_corpora},
                           {"lo", lo}, {"hi", hi}, {"step", step}},
              as_paths(all_inputs));
      const auto& ds = run.settings().dedup;
      const auto grid = similarity::hundredths_grid(lo > 0 ? lo : ds.sweep_lo, hi > 0 ? hi : ds.sweep_hi,
                                                    step > 0 ? step : ds.sweep_step);
      const auto c = load_corpora(corpora, combined_name);
      const auto result = similarity::threshold_sweep(embed_and_compare(run, c), grid);
      std::optional<similarity::SweepResult> base;
      if (!baseline_corpora.empty()) {
        base = similarity::threshold_sweep(embed_and_compare(run, load_corpora(baseline_corpora, "")), grid);
      }
      run.emit("sweep.csv", report::render_sweep(result, base ? &*base : nullptr, run.hash()));
      auto sj = json::parse(similarity::sweep_json(result));
      if (base) sj["baseline"] = json::parse(similarity::sweep_json(*base));
      sj["manifest"] = run.hash();
      run.emit("sweep.json", sj.dump(2) + "\n");
      print_run_dir(run);
    } else if (*baseline) {
      Run run(g, "baseline", {{"target", target_name}}, as_paths(corpora));
      auto& reg = run.registry();
      const auto& target = reg.target(target_name);
      const auto c = load_corpora(corpora, "");
      auto client = reg.chat_client(target, "target");
      const auto result = laundering::eval_baseline(c, *client, target.spec, *reg.judge(),
                                                    run.settings().workers);
      std::string lines;
      for (const auto& r : result.records) {
        json j = {{"id", r.datapoint_id}, {"response", r.response}, {"truncated", r.truncated}};
        if (r.verdict) {
          j["safety"] = to_string(r.verdict->safety);
          j["unsafe"] = metrics::safety_binary(r.verdict->safety);
          j["raw_safety"] = r.verdict->raw_safety;
        } else {
          j["error"] = r.error;
        }
        lines += j.dump() + "\n";
      }
      run.emit("baseline.jsonl", lines);
      run.emit("baseline.json", json{{"target_model", target.spec.model_id},
                                     {"n", result.aggregate.n},
                                     {"unsafe", result.aggregate.unsafe},
                                     {"asr", result.aggregate.asr()},
                                     {"manifest", run.hash()}}.dump(2) + "\n");
      std::cout << fmt::format("baseline ASR {:.2f} ({} / {})\n", result.aggregate.asr(),
                               result.aggregate.unsafe, result.aggregate.n);
      print_run_dir(run);
    } else if (*campaign) {
      Run run(g, "campaign", {{"target", target_name}, {"max_iterations", max_iterations},
                              {"target_asr", target_asr}, {"with_baseline", with_baseline}},
              as_paths(corpora));
      auto& reg = run.registry();
      const auto& target = reg.target(target_name);
      const auto c = load_corpora(corpora, "");
      auto pipeline = reg.pipeline(target);
      auto cfg = reg.campaign_config(target);
      if (max_iterations > 0) cfg.max_iterations = max_iterations;
      if (target_asr >= 0) cfg.target_asr = target_asr;
      cfg.checkpoint = run.dir() / "checkpoint.json";
      std::optional<double> base_asr;
      if (with_baseline) {
        base_asr = laundering::eval_baseline(c, *pipeline.target, target.spec, *pipeline.judge,
                                             cfg.workers).aggregate.asr();
      }
      auto result = laundering::run_campaign(c, cfg, pipeline);
      result.baseline_asr = base_asr;
      run.emit("records.jsonl", laundering::records_jsonl(result));
      auto summary = laundering::summary_json(result);
      summary["manifest"] = run.hash();
      run.emit("summary.json", summary.dump(2) + "\n");
      const std::vector<report::CampaignRow> rows{report::to_row(result, target.name)};
      const auto table = report::render_campaign(rows, run.settings().mean_asr_rule, run.hash());
      run.emit("table.md", table.markdown);
      run.emit("table.csv", table.csv);
      std::cout << table.markdown;
      print_run_dir(run);
    } else if (*agree) {
      Run run(g, "agree", {{"resamples", resamples}, {"level", level}}, {fs::path(agree_input)});
      const auto rows = metrics::parse_agreement_csv(read_text(agree_input));
      const auto r = metrics::agreement_report(rows, resamples, level, g.seed);
      run.emit("agreement.json", report::agreement_json(r, run.hash()));
      std::cout << fmt::format("agreement {:.2f}% [{:.2f}%, {:.2f}%] n={}\n", 100 * r.point_estimate,
                               100 * r.ci_low, 100 * r.ci_high, r.n);
      print_run_dir(run);
    } else if (*rep) {
      std::vector<std::pair<std::string, fs::path>> labelled;
      for (const auto& s : summaries) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) labelled.emplace_back("", s);
        else labelled.emplace_back(s.substr(0, eq), s.substr(eq + 1));
      }
      std::vector<fs::path> paths;
      for (const auto& [_, p] : labelled) paths.push_back(p);
      Run run(g, "report", {{"summaries", summaries}, {"mean_rule", mean_rule}}, paths);
      std::vector<report::CampaignRow> rows;
      for (const auto& [label, p] : labelled) {
        const auto result = laundering::result_from_json(json::parse(read_text(p)));
        rows.push_back(report::to_row(result, label.empty() ? result.target_model : label));
      }
      const auto rule = mean_rule.empty() ? run.settings().mean_asr_rule : report::parse_mean_asr_rule(mean_rule);
      const auto table = report::render_campaign(rows, rule, run.hash());
      run.emit("table.md", table.markdown);
      run.emit("table.csv", table.csv);
      std::cout << table.markdown;
      print_run_dir(run);
    }
  } catch (const laundering::CampaignAborted& e) {
    spdlog::error("{} (completed iterations: {})", e.what(), e.partial().iterations.size());
    return 3;
  } catch (const ConfigError& e) {
    spdlog::error("configuration: {}", e.what());
    return 2;
  } catch (const InputError& e) {
    spdlog::error("input: {}", e.what());
    return 2;
  } catch (const ProviderError& e) {
    spdlog::error("provider: {}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
