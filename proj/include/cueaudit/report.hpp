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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cueaudit/laundering.hpp"
#include "cueaudit/metrics.hpp"
#include "cueaudit/similarity.hpp"
#include "cueaudit/textstats.hpp"
#include "json.hpp"

namespace cueaudit::report {

// How the Mean row's ASR is formed. `se_times_pe` multiplies the column
// means of SE and PE; `arithmetic` averages the ASR column like the others.
enum class MeanAsrRule { se_times_pe, arithmetic };

std::string_view to_string(MeanAsrRule rule);
MeanAsrRule parse_mean_asr_rule(std::string_view s);

// Percentages for one iteration.
struct Triple {
  double se = 0.0;
  double pe = 0.0;
  double asr = 0.0;
};

struct CampaignRow {
  std::string name;
  std::optional<double> baseline_asr;
  std::vector<Triple> iterations;
};

CampaignRow to_row(const laundering::CampaignResult& result, std::string name);

// Column means over the rows that have the column.
CampaignRow mean_row(std::span<const CampaignRow> rows, MeanAsrRule rule);

// Index of the emphasized ASR cell: 0 = baseline, k = iteration k. The
// largest value after rounding to 2 decimals; ties go to the last one.
std::size_t max_asr_column(const CampaignRow& row);

struct Rendered {
  std::string markdown;
  std::string csv;
};

// Rows, then a Mean row. Every number is printed with 2 decimals in both
// outputs; the markdown bolds each row's max_asr_column.
Rendered render_campaign(std::span<const CampaignRow> rows,
                         MeanAsrRule rule = MeanAsrRule::se_times_pe,
                         std::string_view manifest_hash = {});

// threshold, unique_fraction, duplicate_fraction, group_count, plus
// baseline_* columns when a baseline sweep is given. Rows ascend by
// threshold; the two sweeps must cover the same thresholds.
std::string render_sweep(const similarity::SweepResult& sweep,
                         const similarity::SweepResult* baseline = nullptr,
                         std::string_view manifest_hash = {});

struct NGramSection {
  std::size_t n = 1;
  std::vector<textstats::TaggedPhrase> rows;
};

std::vector<NGramSection> ngram_sections(std::span<const textstats::NGramTable> tables,
                                         const textstats::CueLexicon& lexicon, std::size_t k = 40);

// Columns n, rank, phrase, count, category ("none" when untagged).
std::string render_ngrams_csv(std::span<const NGramSection> sections,
                              std::string_view manifest_hash = {});
std::string render_ngrams_json(std::span<const NGramSection> sections,
                               std::string_view manifest_hash = {});

std::string agreement_json(const metrics::AgreementReport& report,
                           std::string_view manifest_hash = {});

// Describes a run. The hash covers everything except the timestamp, so
// identical configurations land in the same run directory.
struct Manifest {
  nlohmann::json body = nlohmann::json::object();
  std::string timestamp;

  std::string hash() const;
  std::string short_hash() const { return hash().substr(0, 12); }
  std::string dump() const;
};

// Current UTC time, ISO 8601.
std::string utc_timestamp();

// "# manifest: <hash>\n" for CSV outputs; empty when no hash is given.
std::string csv_manifest_line(std::string_view manifest_hash);

}  // namespace cueaudit::report
