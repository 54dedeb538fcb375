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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cueaudit::corpus {

// One request (or baseline question). `text` is the normalized form used for
// analysis; `raw_text` is the file's original string and is what gets sent to
// models.
struct DataPoint {
  std::string id;
  std::string text;
  std::string raw_text;
  std::string source;

  bool operator==(const DataPoint&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<DataPoint> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  bool operator==(const Corpus&) const = default;
};

enum class Format { csv, jsonl, lines };

Format parse_format(std::string_view name);

// Keep only rows where `column` equals `value` (csv/jsonl only). Rows that
// fail the filter still consume a row index, so ids stay positional.
struct RowFilter {
  std::string column;
  std::string value;
};

struct LoadOptions {
  Format format = Format::lines;
  // Column name (csv) or key (jsonl; a leading '/' selects a JSON pointer).
  std::string field;
  // Corpus name and id prefix; defaults to the file stem.
  std::string name;
  std::string source = "custom";
  std::optional<RowFilter> filter;
};

// Field/format defaults for the datasets the tool was built around:
// "advbench" (csv, goal), "harmbench" (csv, Behavior, FunctionalCategory ==
// standard), "gsm8k" (jsonl, question). Throws ConfigError for other names.
LoadOptions preset(std::string_view dataset);

// Lowercase (ASCII), collapse every whitespace run to one space, trim.
std::string normalize(std::string_view raw);

// Ids are "<name>:<row-index>" with 0-based data-row indices (the csv header
// is not a row; blank lines in jsonl/lines files are skipped and not counted).
Corpus load_corpus(const std::filesystem::path& path, LoadOptions options);
Corpus parse_corpus(std::string_view content, const LoadOptions& options);

// n items uniformly without replacement, original order kept.
Corpus subsample(const Corpus& corpus, std::size_t n, std::uint64_t seed);

// Serialized form: JSONL of {id, text, raw_text, source}.
std::string to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_serialized(const std::filesystem::path& path);
Corpus parse_serialized(std::string_view content, std::string fallback_name = {});

// Concatenates corpora (e.g. the combined AdvBench + HarmBench n-gram view).
// Throws InputError on id collisions.
Corpus concat(const std::vector<Corpus>& parts, std::string name);

}  // namespace cueaudit::corpus
