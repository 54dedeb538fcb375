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

#include "cueaudit/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include "cueaudit/csv.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/hashing.hpp"

namespace cueaudit::report {

using nlohmann::json;

namespace {

std::string pct(double v) { return fmt::format("{:.2f}", v); }

std::string opt_pct(const std::optional<double>& v) { return v ? pct(*v) : std::string(); }

std::size_t column_count(std::span<const CampaignRow> rows) {
  std::size_t k = 0;
  for (const auto& r : rows) k = std::max(k, r.iterations.size());
  return k;
}

std::string ordinal_header(std::size_t k) { return "Iteration " + std::to_string(k); }

json with_manifest(json j, std::string_view manifest_hash) {
  if (!manifest_hash.empty()) j["manifest"] = std::string(manifest_hash);
  return j;
}

}  // namespace

std::string_view to_string(MeanAsrRule rule) {
  return rule == MeanAsrRule::arithmetic ? "arithmetic" : "se_times_pe";
}

MeanAsrRule parse_mean_asr_rule(std::string_view s) {
  if (s == "se_times_pe") return MeanAsrRule::se_times_pe;
  if (s == "arithmetic") return MeanAsrRule::arithmetic;
  throw ConfigError("unknown mean ASR rule '" + std::string(s) + "'");
}

CampaignRow to_row(const laundering::CampaignResult& result, std::string name) {
  CampaignRow row{std::move(name), result.baseline_asr, {}};
  for (const auto& it : result.iterations) {
    row.iterations.push_back({it.aggregate.se(), it.aggregate.pe(), it.aggregate.asr()});
  }
  return row;
}

CampaignRow mean_row(std::span<const CampaignRow> rows, MeanAsrRule rule) {
  if (rows.empty()) throw PreconditionError("mean_row: no rows");
  CampaignRow mean{"Mean", std::nullopt, {}};
  double base_sum = 0.0;
  std::size_t base_n = 0;
  for (const auto& r : rows) {
    if (r.baseline_asr) {
      base_sum += *r.baseline_asr;
      ++base_n;
    }
  }
  if (base_n) mean.baseline_asr = base_sum / static_cast<double>(base_n);
  for (std::size_t k = 0; k < column_count(rows); ++k) {
    Triple sum;
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (k >= r.iterations.size()) continue;
      sum.se += r.iterations[k].se;
      sum.pe += r.iterations[k].pe;
      sum.asr += r.iterations[k].asr;
      ++n;
    }
    const double d = static_cast<double>(n);
    Triple m{sum.se / d, sum.pe / d, sum.asr / d};
    if (rule == MeanAsrRule::se_times_pe) m.asr = m.se * m.pe / 100.0;
    mean.iterations.push_back(m);
  }
  return mean;
}

std::size_t max_asr_column(const CampaignRow& row) {
  std::size_t best = 0;
  double best_value = -1.0;
  if (row.baseline_asr) best_value = metrics::round2(*row.baseline_asr);
  for (std::size_t k = 0; k < row.iterations.size(); ++k) {
    const double v = metrics::round2(row.iterations[k].asr);
    if (v >= best_value) {
      best_value = v;
      best = k + 1;
    }
  }
  return best;
}

Rendered render_campaign(std::span<const CampaignRow> rows, MeanAsrRule rule,
                         std::string_view manifest_hash) {
  if (rows.empty()) throw PreconditionError("render_campaign: no rows");
  const std::size_t k = column_count(rows);
  if (k == 0) throw PreconditionError("render_campaign: no iterations");

  std::vector<CampaignRow> all(rows.begin(), rows.end());
  all.push_back(mean_row(rows, rule));

  Rendered out;
  if (!manifest_hash.empty()) out.markdown = fmt::format("<!-- manifest: {} -->\n", manifest_hash);
  out.csv = csv_manifest_line(manifest_hash);

  std::string top = "| Model | No Revision |";
  std::string sub = "|  | ASR |";
  std::string rule_line = "|---|---:|";
  std::vector<std::string> header{"model", "no_revision_asr"};
  for (std::size_t c = 1; c <= k; ++c) {
    top += " " + ordinal_header(c) + " | | |";
    sub += " SE | PE | ASR |";
    rule_line += "---:|---:|---:|";
    for (const char* m : {"se", "pe", "asr"}) header.push_back(fmt::format("iter{}_{}", c, m));
  }
  out.markdown += top + "\n" + rule_line + "\n" + sub + "\n";
  out.csv += csv::format_row(header) + "\n";

  for (const auto& row : all) {
    const std::size_t emph = max_asr_column(row);
    auto cell = [&](const std::string& text, bool bold) {
      return text.empty() ? std::string("-") : (bold ? "**" + text + "**" : text);
    };
    std::string line = "| " + row.name + " | " + cell(opt_pct(row.baseline_asr), emph == 0) + " |";
    std::vector<std::string> fields{row.name, opt_pct(row.baseline_asr)};
    for (std::size_t c = 0; c < k; ++c) {
      if (c < row.iterations.size()) {
        const auto& t = row.iterations[c];
        line += " " + pct(t.se) + " | " + pct(t.pe) + " | " + cell(pct(t.asr), emph == c + 1) + " |";
        fields.insert(fields.end(), {pct(t.se), pct(t.pe), pct(t.asr)});
      } else {
        line += " - | - | - |";
        fields.insert(fields.end(), {"", "", ""});
      }
    }
    out.markdown += line + "\n";
    out.csv += csv::format_row(fields) + "\n";
  }
  return out;
}

std::string render_sweep(const similarity::SweepResult& sweep,
                         const similarity::SweepResult* baseline, std::string_view manifest_hash) {
  if (sweep.records.empty()) throw PreconditionError("render_sweep: empty sweep");
  auto sorted = [](std::vector<similarity::SweepRecord> r) {
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.threshold < b.threshold; });
    return r;
  };
  const auto main = sorted(sweep.records);
  std::vector<similarity::SweepRecord> base;
  if (baseline) {
    base = sorted(baseline->records);
    bool aligned = base.size() == main.size();
    for (std::size_t i = 0; aligned && i < main.size(); ++i) {
      aligned = std::abs(base[i].threshold - main[i].threshold) < 1e-12;
    }
    if (!aligned) throw PreconditionError("render_sweep: sweep and baseline thresholds differ");
  }

  std::string out = csv_manifest_line(manifest_hash);
  out += "threshold,unique_fraction,duplicate_fraction,group_count";
  if (baseline) out += ",baseline_unique_fraction,baseline_duplicate_fraction,baseline_group_count";
  out += "\n";
  for (std::size_t i = 0; i < main.size(); ++i) {
    const auto& r = main[i];
    out += fmt::format("{:.2f},{:.6f},{:.6f},{}", r.threshold, r.unique_fraction(),
                       r.duplicate_fraction(), r.group_count);
    if (baseline) {
      out += fmt::format(",{:.6f},{:.6f},{}", base[i].unique_fraction(), base[i].duplicate_fraction(),
                         base[i].group_count);
    }
    out += "\n";
  }
  return out;
}

std::vector<NGramSection> ngram_sections(std::span<const textstats::NGramTable> tables,
                                         const textstats::CueLexicon& lexicon, std::size_t k) {
  if (k < 1) throw PreconditionError("render_ngrams: k must be >= 1");
  std::vector<NGramSection> out;
  for (const auto& t : tables) {
    const auto ranked = textstats::top_k(t, k);
    out.push_back({t.n, textstats::tag_cues(ranked, lexicon)});
  }
  return out;
}

std::string render_ngrams_csv(std::span<const NGramSection> sections,
                              std::string_view manifest_hash) {
  std::string out = csv_manifest_line(manifest_hash);
  out += "n,rank,phrase,count,category\n";
  for (const auto& s : sections) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const auto& r = s.rows[i];
      out += csv::format_row({std::to_string(s.n), std::to_string(i + 1), r.phrase,
                              std::to_string(r.count),
                              r.category ? std::string(textstats::to_string(*r.category)) : "none"});
      out += "\n";
    }
  }
  return out;
}

std::string render_ngrams_json(std::span<const NGramSection> sections,
                               std::string_view manifest_hash) {
  json arr = json::array();
  for (const auto& s : sections) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const auto& r = s.rows[i];
      rows.push_back({{"rank", i + 1},
                      {"phrase", r.phrase},
                      {"count", r.count},
                      {"category", r.category ? json(textstats::to_string(*r.category)) : json(nullptr)}});
    }
    arr.push_back({{"n", s.n}, {"rows", std::move(rows)}});
  }
  return with_manifest(json{{"sections", std::move(arr)}}, manifest_hash).dump(2) + "\n";
}

std::string agreement_json(const metrics::AgreementReport& r, std::string_view manifest_hash) {
  json j = {{"point_estimate", r.point_estimate},
            {"ci_low", r.ci_low},
            {"ci_high", r.ci_high},
            {"n", r.n},
            {"resamples", r.resamples},
            {"level", r.level},
            {"seed", r.seed},
            {"human_pairwise_agreement", r.human_pairwise_agreement}};
  return with_manifest(std::move(j), manifest_hash).dump(2) + "\n";
}

std::string Manifest::hash() const { return sha256_hex(body.dump()); }

std::string Manifest::dump() const {
  json j = body;
  j["manifest_hash"] = hash();
  j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_manifest_line(std::string_view manifest_hash) {
  if (manifest_hash.empty()) return {};
  return "# manifest: " + std::string(manifest_hash) + "\n";
}

}  // namespace cueaudit::report
