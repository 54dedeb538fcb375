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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cueaudit/corpus.hpp"

namespace cueaudit::textstats {

// Frequency table of order-n phrases (n space-separated tokens per key).
struct NGramTable {
  std::size_t n = 1;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
};

struct FilterConfig {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> instruction_words;
  bool strip_punctuation = true;
};

enum class CueCategory { inherent, contextual };

std::string_view to_string(CueCategory c);
CueCategory parse_cue_category(std::string_view s);

struct CueLexicon {
  std::map<std::string, CueCategory> entries;
};

struct RankedPhrase {
  std::string phrase;
  std::uint64_t count = 0;
  bool operator==(const RankedPhrase&) const = default;
};

struct TaggedPhrase {
  std::string phrase;
  std::uint64_t count = 0;
  std::optional<CueCategory> category;
  bool operator==(const TaggedPhrase&) const = default;
};

// write, generate, create, develop, use, give, provide, people.
const std::unordered_set<std::string>& default_instruction_words();

// The shipped English stopword asset (assets/stopwords_en.txt, or
// $CUEAUDIT_ASSETS/stopwords_en.txt when that variable is set).
std::unordered_set<std::string> default_stopwords();

// Default stopwords + the eight instruction words, punctuation stripped.
FilterConfig default_filter();

// One entry per line; blank lines and lines starting with '#' are skipped.
// Entries are normalized (lowercased, whitespace collapsed).
std::unordered_set<std::string> load_word_list(const std::filesystem::path& path);

// One "phrase<TAB>category" entry per line, category inherent|contextual.
CueLexicon load_lexicon(const std::filesystem::path& path);
CueLexicon parse_lexicon(std::string_view content);

// Drops every character that is not alphanumeric, keeping '-' and '\''
// (and U+2019) only when both neighbours are alphanumeric.
std::string strip_punctuation(std::string_view token);

// Whitespace split of `text`, punctuation stripping per the flag, then
// removal of empty tokens, stopwords and instruction words.
std::vector<std::string> filtered_tokens(std::string_view text, const FilterConfig& filter);

// n-grams are formed inside each document after filtering.
NGramTable extract_ngrams(std::span<const std::string> documents, std::size_t n,
                          const FilterConfig& filter);
NGramTable extract_ngrams(const corpus::Corpus& corpus, std::size_t n, const FilterConfig& filter);

// Count descending, ties by phrase ascending.
std::vector<RankedPhrase> top_k(const NGramTable& table, std::size_t k);

std::vector<TaggedPhrase> tag_cues(std::span<const RankedPhrase> ranked, const CueLexicon& lexicon);

}  // namespace cueaudit::textstats
