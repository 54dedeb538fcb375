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

#include "cueaudit/textstats.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cueaudit/error.hpp"

namespace cueaudit::textstats {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

bool skip_line(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

// A decoded code point plus its byte range in the token.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && i + 3 < s.size()) {
      len = 4;
      cp = ((b0 & 0x07u) << 18) | ((s[i + 1] & 0x3Fu) << 12) | ((s[i + 2] & 0x3Fu) << 6) |
           (s[i + 3] & 0x3Fu);
    } else if (b0 >= 0xE0 && i + 2 < s.size()) {
      len = 3;
      cp = ((b0 & 0x0Fu) << 12) | ((s[i + 1] & 0x3Fu) << 6) | (s[i + 2] & 0x3Fu);
    } else if (b0 >= 0xC0 && i + 1 < s.size()) {
      len = 2;
      cp = ((b0 & 0x1Fu) << 6) | (s[i + 1] & 0x3Fu);
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  // Latin-1 punctuation/symbols, General Punctuation, CJK punctuation,
  // fullwidth ASCII punctuation.
  if (cp >= 0xA0 && cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return false;
  return true;
}

bool is_joiner(char32_t cp) { return cp == '-' || cp == '\'' || cp == 0x2019; }

}  // namespace

std::string_view to_string(CueCategory c) {
  return c == CueCategory::inherent ? "inherent" : "contextual";
}

CueCategory parse_cue_category(std::string_view s) {
  if (s == "inherent") return CueCategory::inherent;
  if (s == "contextual") return CueCategory::contextual;
  throw InputError("unknown cue category '" + std::string(s) + "'");
}

const std::unordered_set<std::string>& default_instruction_words() {
  static const std::unordered_set<std::string> words = {
      "write", "generate", "create", "develop", "use", "give", "provide", "people"};
  return words;
}

std::unordered_set<std::string> default_stopwords() {
  std::filesystem::path dir = CUEAUDIT_ASSET_DIR;
  if (const char* env = std::getenv("CUEAUDIT_ASSETS"); env != nullptr && *env != '\0') {
    dir = env;
  }
  return load_word_list(dir / "stopwords_en.txt");
}

FilterConfig default_filter() {
  return FilterConfig{default_stopwords(), default_instruction_words(), true};
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
  std::unordered_set<std::string> words;
  for (const auto& line : split_lines(read_text(path))) {
    if (skip_line(line)) continue;
    words.insert(corpus::normalize(line));
  }
  return words;
}

CueLexicon parse_lexicon(std::string_view content) {
  CueLexicon lexicon;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(std::string(content))) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw InputError("lexicon line " + std::to_string(line_no) +
                       ": expected '<phrase>\\t<category>'");
    }
    auto phrase = corpus::normalize(std::string_view(line).substr(0, tab));
    auto category = corpus::normalize(std::string_view(line).substr(tab + 1));
    if (phrase.empty()) throw InputError("lexicon line " + std::to_string(line_no) + ": empty phrase");
    lexicon.entries[phrase] = parse_cue_category(category);
  }
  return lexicon;
}

CueLexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_text(path));
}

std::string strip_punctuation(std::string_view token) {
  const auto cps = decode_utf8(token);
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const auto& cp = cps[i];
    bool keep = is_word_char(cp.value);
    if (!keep && is_joiner(cp.value)) {
      keep = i > 0 && i + 1 < cps.size() && is_word_char(cps[i - 1].value) &&
             is_word_char(cps[i + 1].value);
    }
    if (keep) out.append(token.substr(cp.offset, cp.length));
  }
  return out;
}

std::vector<std::string> filtered_tokens(std::string_view text, const FilterConfig& filter) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok = filter.strip_punctuation ? strip_punctuation(text.substr(i, j - i))
                                                 : std::string(text.substr(i, j - i));
      if (!tok.empty() && !filter.stopwords.contains(tok) &&
          !filter.instruction_words.contains(tok)) {
        tokens.push_back(std::move(tok));
      }
    }
    i = j;
  }
  return tokens;
}

NGramTable extract_ngrams(std::span<const std::string> documents, std::size_t n,
                          const FilterConfig& filter) {
  if (n < 1) throw PreconditionError("extract_ngrams: n must be >= 1");
  NGramTable table;
  table.n = n;
  for (const auto& doc : documents) {
    const auto tokens = filtered_tokens(doc, filter);
    if (tokens.size() < n) continue;
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      std::string phrase = tokens[start];
      for (std::size_t k = 1; k < n; ++k) {
        phrase.push_back(' ');
        phrase += tokens[start + k];
      }
      ++table.counts[phrase];
      ++table.total;
    }
  }
  return table;
}

NGramTable extract_ngrams(const corpus::Corpus& corpus, std::size_t n, const FilterConfig& filter) {
  std::vector<std::string> docs;
  docs.reserve(corpus.size());
  for (const auto& dp : corpus.items) docs.push_back(dp.text);
  return extract_ngrams(docs, n, filter);
}

std::vector<RankedPhrase> top_k(const NGramTable& table, std::size_t k) {
  std::vector<RankedPhrase> ranked;
  ranked.reserve(table.counts.size());
  for (const auto& [phrase, count] : table.counts) ranked.push_back({phrase, count});
  const auto by_rank = [](const RankedPhrase& a, const RankedPhrase& b) {
    return a.count != b.count ? a.count > b.count : a.phrase < b.phrase;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_rank);
  ranked.resize(keep);
  return ranked;
}

std::vector<TaggedPhrase> tag_cues(std::span<const RankedPhrase> ranked, const CueLexicon& lexicon) {
  std::vector<TaggedPhrase> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) {
    TaggedPhrase t{r.phrase, r.count, std::nullopt};
    if (auto it = lexicon.entries.find(r.phrase); it != lexicon.entries.end()) {
      t.category = it->second;
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace cueaudit::textstats
