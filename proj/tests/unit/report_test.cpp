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

#include <cstdio>
#include <regex>

#include "cueaudit/csv.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/report.hpp"
#include "test_support.hpp"

using namespace cueaudit;
using namespace cueaudit::report;
using metrics::round2;

namespace {

const std::filesystem::path kTable = std::filesystem::path(CUEAUDIT_FIXTURE_DIR) / "published_results.csv";

std::string strip_bold(std::string s) {
  return std::regex_replace(s, std::regex("\\*\\*"), "");
}

std::vector<std::string> markdown_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (std::size_t i = 1; i < line.size(); ++i) {
    if (line[i] == '|') {
      const auto b = cell.find_first_not_of(' ');
      const auto e = cell.find_last_not_of(' ');
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
      cell.clear();
    } else {
      cell.push_back(line[i]);
    }
  }
  return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

// The published Mean rows are reproduced from the model rows with
// ASR = mean(SE) * mean(PE) / 100; averaging the ASR column instead does
// not reproduce them.
TEST(MeanRow, ReproducesPublishedTable) {
  const auto tables = support::load_published_table(kTable);
  ASSERT_EQ(tables.size(), 2u);
  for (const auto& [dataset, table] : tables) {
    const auto mean = mean_row(table.models, MeanAsrRule::se_times_pe);
    ASSERT_EQ(mean.iterations.size(), table.mean.iterations.size()) << dataset;
    EXPECT_NEAR(round2(*mean.baseline_asr), *table.mean.baseline_asr, 0.0100001) << dataset;
    for (std::size_t k = 0; k < mean.iterations.size(); ++k) {
      const auto& got = mean.iterations[k];
      const auto& want = table.mean.iterations[k];
      EXPECT_NEAR(round2(got.se), want.se, 0.0100001) << dataset << " iteration " << k + 1;
      EXPECT_NEAR(round2(got.pe), want.pe, 0.0100001) << dataset << " iteration " << k + 1;
      EXPECT_NEAR(round2(got.asr), want.asr, 0.0100001) << dataset << " iteration " << k + 1;
    }
  }
  const auto arithmetic = mean_row(tables.at("advbench").models, MeanAsrRule::arithmetic);
  EXPECT_DOUBLE_EQ(round2(arithmetic.iterations[0].asr), 86.82);
  EXPECT_DOUBLE_EQ(tables.at("advbench").mean.iterations[0].asr, 86.79);
}

TEST(MeanRow, SkipsRowsWithoutAColumn) {
  const std::vector<CampaignRow> rows{{"a", 10.0, {{50, 50, 25}, {80, 100, 80}}},
                                      {"b", std::nullopt, {{100, 50, 50}}}};
  const auto m = mean_row(rows, MeanAsrRule::arithmetic);
  EXPECT_DOUBLE_EQ(*m.baseline_asr, 10.0);
  ASSERT_EQ(m.iterations.size(), 2u);
  EXPECT_DOUBLE_EQ(m.iterations[0].asr, 37.5);
  EXPECT_DOUBLE_EQ(m.iterations[1].se, 80.0);
  EXPECT_EQ(m.name, "Mean");
  EXPECT_THROW(mean_row({}, MeanAsrRule::arithmetic), PreconditionError);
  EXPECT_EQ(parse_mean_asr_rule("arithmetic"), MeanAsrRule::arithmetic);
  EXPECT_EQ(parse_mean_asr_rule(to_string(MeanAsrRule::se_times_pe)), MeanAsrRule::se_times_pe);
  EXPECT_THROW(parse_mean_asr_rule("median"), ConfigError);
}

TEST(MaxColumn, RoundedTiesGoToTheLast) {
  EXPECT_EQ(max_asr_column({"r", 1.0, {{0, 0, 10.0}, {0, 0, 10.004}, {0, 0, 9.0}}}), 2u);
  EXPECT_EQ(max_asr_column({"r", 1.0, {{0, 0, 10.006}, {0, 0, 10.004}}}), 1u);
  EXPECT_EQ(max_asr_column({"r", 50.0, {{0, 0, 10.0}}}), 0u);
  EXPECT_EQ(max_asr_column({"r", 10.0, {{0, 0, 10.0}}}), 1u);
  EXPECT_EQ(max_asr_column({"r", std::nullopt, {{0, 0, 0.0}}}), 1u);
}

TEST(MaxColumn, PublishedRowsEmphasizeTheirLastIteration) {
  for (const auto& [dataset, table] : support::load_published_table(kTable)) {
    for (const auto& row : table.models) {
      EXPECT_EQ(max_asr_column(row), row.iterations.size()) << dataset << " " << row.name;
    }
  }
}

TEST(RenderCampaign, MarkdownAndCsvAgree) {
  const std::vector<CampaignRow> rows{{"Model A", 2.5, {{80, 90, 72}, {90, 100, 90}}},
                                      {"Model, B", 40.0, {{30, 50, 15}}}};
  const auto out = render_campaign(rows, MeanAsrRule::se_times_pe, "abc123");

  const auto md = lines_of(out.markdown);
  ASSERT_EQ(md.size(), 1u + 3u + 3u);
  EXPECT_EQ(md[0], "<!-- manifest: abc123 -->");
  EXPECT_NE(md[1].find("Iteration 2"), std::string::npos);
  EXPECT_EQ(md[3], "|  | ASR | SE | PE | ASR | SE | PE | ASR |");

  const auto csv_rows = csv::parse(out.csv);
  ASSERT_EQ(csv_rows.size(), 1u + 1u + 3u);
  EXPECT_EQ(csv_rows[0], (csv::Row{"# manifest: abc123"}));
  EXPECT_EQ(csv_rows[1], (csv::Row{"model", "no_revision_asr", "iter1_se", "iter1_pe", "iter1_asr",
                                   "iter2_se", "iter2_pe", "iter2_asr"}));

  for (std::size_t r = 0; r < 3; ++r) {
    const auto cells = markdown_cells(md[4 + r]);
    const auto& fields = csv_rows[2 + r];
    ASSERT_EQ(cells.size(), fields.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto plain = strip_bold(cells[c]);
      EXPECT_EQ(plain == "-" ? std::string() : plain, fields[c]) << "row " << r << " col " << c;
    }
  }
  EXPECT_EQ(md[4], "| Model A | 2.50 | 80.00 | 90.00 | 72.00 | 90.00 | 100.00 | **90.00** |");
  EXPECT_EQ(md[5], "| Model, B | **40.00** | 30.00 | 50.00 | 15.00 | - | - | - |");
  // Mean: SE (80+30)/2 = 55, PE (90+50)/2 = 70, ASR 55 * 70 / 100 = 38.5.
  EXPECT_EQ(csv_rows[4], (csv::Row{"Mean", "21.25", "55.00", "70.00", "38.50", "90.00", "100.00",
                                   "90.00"}));

  const auto bare = render_campaign(rows);
  EXPECT_EQ(bare.csv.rfind("model,", 0), 0u);
  EXPECT_EQ(bare.markdown.rfind("| Model |", 0), 0u);
  EXPECT_THROW(render_campaign({}), PreconditionError);
}

TEST(RenderCampaign, FromCampaignResult) {
  laundering::CampaignResult result;
  result.baseline_asr = 5.0;
  laundering::IterationSummary s;
  s.iteration = 1;
  s.aggregate.n = 4;
  s.aggregate.unsafe = 3;
  s.aggregate.both = 2;
  s.aggregate.practical = 2;
  result.iterations.push_back(s);
  const auto row = to_row(result, "m");
  ASSERT_EQ(row.iterations.size(), 1u);
  EXPECT_DOUBLE_EQ(row.iterations[0].se, 75.0);
  EXPECT_NEAR(row.iterations[0].pe, 200.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(row.iterations[0].asr, 50.0);
  EXPECT_EQ(row.baseline_asr, 5.0);
}

TEST(RenderSweep, ThirtyAlignedRows) {
  Rng rng(5);
  const auto vectors = support::clustered_vectors(rng, 40, 8);
  const auto matrix = similarity::pairwise_cosine(vectors);
  const auto grid = similarity::hundredths_grid(70, 99);
  auto sweep = similarity::threshold_sweep(matrix, grid);
  const auto base = similarity::threshold_sweep(matrix, grid);
  std::reverse(sweep.records.begin(), sweep.records.end());
  const auto csv_text = render_sweep(sweep, &base, "h");
  const auto rows = csv::parse(csv_text);
  ASSERT_EQ(rows.size(), 2u + 30u);
  EXPECT_EQ(rows[1].size(), 7u);
  EXPECT_EQ(rows[1][0], "threshold");
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& r = rows[2 + i];
    char expected[16];
    std::snprintf(expected, sizeof expected, "%.2f", grid[i]);
    EXPECT_EQ(r[0], expected);
    EXPECT_NEAR(std::stod(r[1]) + std::stod(r[2]), 1.0, 1e-5);
    EXPECT_EQ(r[1], r[4]);
    EXPECT_EQ(r[3], r[6]);
  }
  auto shorter = base;
  shorter.records.pop_back();
  EXPECT_THROW(render_sweep(sweep, &shorter), PreconditionError);
  EXPECT_THROW(render_sweep(similarity::SweepResult{}), PreconditionError);
}

TEST(RenderNgrams, SectionsCsvAndJson) {
  textstats::NGramTable uni{1, {{"educational", 5}, {"purposes", 5}, {"write", 2}}, 12};
  textstats::NGramTable bi{2, {{"educational purposes", 4}, {"write story", 1}}, 5};
  const auto lexicon = textstats::parse_lexicon("educational purposes\tcontextual\n");
  const std::vector<textstats::NGramTable> tables{uni, bi};
  const auto sections = ngram_sections(tables, lexicon, 2);
  ASSERT_EQ(sections.size(), 2u);
  EXPECT_EQ(sections[0].rows.size(), 2u);
  EXPECT_EQ(sections[0].rows[0].phrase, "educational");
  EXPECT_EQ(sections[1].rows[0].category, textstats::CueCategory::contextual);

  const auto rows = csv::parse(render_ngrams_csv(sections));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (csv::Row{"n", "rank", "phrase", "count", "category"}));
  EXPECT_EQ(rows[2], (csv::Row{"1", "2", "purposes", "5", "none"}));
  EXPECT_EQ(rows[3], (csv::Row{"2", "1", "educational purposes", "4", "contextual"}));

  const auto j = nlohmann::json::parse(render_ngrams_json(sections, "m1"));
  EXPECT_EQ(j["manifest"], "m1");
  EXPECT_TRUE(j["sections"][0]["rows"][0]["category"].is_null());
  EXPECT_THROW(ngram_sections(tables, lexicon, 0), PreconditionError);
}

TEST(Manifest, HashIgnoresTimestamp) {
  Manifest a;
  a.body = {{"command", "campaign"}, {"seed", 1}};
  a.timestamp = "2026-01-01T00:00:00Z";
  Manifest b = a;
  b.timestamp = utc_timestamp();
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 64u);
  EXPECT_EQ(a.short_hash(), a.hash().substr(0, 12));
  b.body["seed"] = 2;
  EXPECT_NE(a.hash(), b.hash());
  const auto dumped = nlohmann::json::parse(a.dump());
  EXPECT_EQ(dumped["manifest_hash"], a.hash());
  EXPECT_EQ(dumped["timestamp"], a.timestamp);
  EXPECT_EQ(csv_manifest_line(""), "");
  EXPECT_TRUE(std::regex_match(utc_timestamp(),
                               std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}
