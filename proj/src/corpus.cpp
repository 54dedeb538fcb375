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

#include "cueaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "cueaudit/csv.hpp"
#include "cueaudit/error.hpp"
#include "cueaudit/random.hpp"
#include "json.hpp"

namespace cueaudit::corpus {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
           c == '\f';
  });
}

std::string json_field(const json& obj, const std::string& field) {
  const json* node = nullptr;
  if (!field.empty() && field.front() == '/') {
    json::json_pointer ptr(field);
    if (obj.contains(ptr)) node = &obj.at(ptr);
  } else if (obj.is_object() && obj.contains(field)) {
    node = &obj.at(field);
  }
  if (node == nullptr) return {};
  if (!node->is_string()) throw InputError("field '" + field + "' is not a string");
  return node->get<std::string>();
}

struct RawRow {
  std::size_t index;
  std::string value;
};

std::vector<RawRow> csv_rows(std::string_view content, const LoadOptions& opt) {
  auto table = csv::parse(content);
  if (table.empty()) return {};
  const auto& header = table.front();
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t field_col = column(opt.field);
  std::optional<std::size_t> filter_col;
  if (opt.filter) filter_col = column(opt.filter->column);

  std::vector<RawRow> rows;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    const std::size_t index = r - 1;
    if (row.size() <= field_col) {
      throw InputError("csv: row " + std::to_string(index) + " has no '" +
                       opt.field + "' value");
    }
    if (filter_col && (row.size() <= *filter_col || row[*filter_col] != opt.filter->value)) {
      continue;
    }
    rows.push_back({index, row[field_col]});
  }
  return rows;
}

std::vector<RawRow> jsonl_rows(std::string_view content, const LoadOptions& opt) {
  std::vector<RawRow> rows;
  std::size_t index = 0;
  for (auto line : split_lines(content)) {
    if (is_blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError("jsonl: row " + std::to_string(index) + ": " + e.what());
    }
    const std::size_t this_index = index++;
    if (opt.filter && json_field(obj, opt.filter->column) != opt.filter->value) continue;
    const bool present = opt.field.front() == '/'
                             ? obj.contains(json::json_pointer(opt.field))
                             : obj.is_object() && obj.contains(opt.field);
    if (!present) {
      throw InputError("jsonl: row " + std::to_string(this_index) + " has no '" +
                       opt.field + "' key");
    }
    rows.push_back({this_index, json_field(obj, opt.field)});
  }
  return rows;
}

std::vector<RawRow> line_rows(std::string_view content) {
  std::vector<RawRow> rows;
  for (auto line : split_lines(content)) {
    if (is_blank(line)) continue;
    rows.push_back({rows.size(), std::string(line)});
  }
  return rows;
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "jsonl") return Format::jsonl;
  if (name == "lines" || name == "txt") return Format::lines;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

LoadOptions preset(std::string_view dataset) {
  LoadOptions opt;
  if (dataset == "advbench") {
    opt.format = Format::csv;
    opt.field = "goal";
    opt.source = "advbench";
  } else if (dataset == "harmbench") {
    opt.format = Format::csv;
    opt.field = "Behavior";
    opt.source = "harmbench";
    opt.filter = RowFilter{"FunctionalCategory", "standard"};
  } else if (dataset == "gsm8k") {
    opt.format = Format::jsonl;
    opt.field = "question";
    opt.source = "gsm8k";
  } else {
    throw ConfigError("unknown dataset preset '" + std::string(dataset) + "'");
  }
  opt.name = std::string(dataset);
  return opt;
}

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    // U+00A0 no-break space.
    if (c == 0xC2 && i + 1 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0xA0) {
      space = true;
      ++i;
    }
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
  }
  return out;
}

Corpus parse_corpus(std::string_view content, const LoadOptions& options) {
  if (options.format != Format::lines && options.field.empty()) {
    throw ConfigError("a field selector is required for csv/jsonl corpora");
  }
  std::vector<RawRow> rows;
  switch (options.format) {
    case Format::csv: rows = csv_rows(content, options); break;
    case Format::jsonl: rows = jsonl_rows(content, options); break;
    case Format::lines: rows = line_rows(content); break;
  }
  if (rows.empty()) throw InputError("corpus '" + options.name + "' is empty");

  Corpus corpus{options.name, {}};
  corpus.items.reserve(rows.size());
  for (auto& row : rows) {
    DataPoint dp;
    dp.id = options.name + ":" + std::to_string(row.index);
    dp.text = normalize(row.value);
    if (dp.text.empty()) {
      throw InputError("corpus '" + options.name + "': row " + std::to_string(row.index) +
                       " is empty after normalization");
    }
    dp.raw_text = std::move(row.value);
    dp.source = options.source;
    corpus.items.push_back(std::move(dp));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, LoadOptions options) {
  if (!std::filesystem::exists(path)) {
    throw InputError("corpus file '" + path.string() + "' does not exist");
  }
  if (options.name.empty()) options.name = path.stem().string();
  return parse_corpus(read_file(path), options);
}

Corpus subsample(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n > corpus.size()) {
    throw PreconditionError("subsample: n=" + std::to_string(n) + " exceeds corpus size " +
                            std::to_string(corpus.size()));
  }
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());

  Corpus out{corpus.name, {}};
  out.items.reserve(n);
  for (auto i : idx) out.items.push_back(corpus.items[i]);
  return out;
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& dp : corpus.items) {
    json row = {{"id", dp.id}, {"text", dp.text}, {"raw_text", dp.raw_text}, {"source", dp.source}};
    out += row.dump();
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << to_jsonl(corpus);
}

Corpus parse_serialized(std::string_view content, std::string fallback_name) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (auto line : split_lines(content)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      auto row = json::parse(line);
      DataPoint dp{row.at("id").get<std::string>(), row.at("text").get<std::string>(),
                   row.value("raw_text", std::string{}), row.value("source", std::string{})};
      if (dp.raw_text.empty()) dp.raw_text = dp.text;
      if (dp.text.empty()) throw InputError("empty text");
      if (!seen.insert(dp.id).second) throw InputError("duplicate id '" + dp.id + "'");
      corpus.items.push_back(std::move(dp));
    } catch (const json::exception& e) {
      throw InputError("serialized corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("serialized corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (corpus.items.empty()) throw InputError("serialized corpus is empty");
  const auto& first = corpus.items.front().id;
  const auto colon = first.rfind(':');
  corpus.name = colon == std::string::npos ? std::move(fallback_name) : first.substr(0, colon);
  return corpus;
}

Corpus read_serialized(const std::filesystem::path& path) {
  return parse_serialized(read_file(path), path.stem().string());
}

Corpus concat(const std::vector<Corpus>& parts, std::string name) {
  Corpus out{std::move(name), {}};
  std::unordered_set<std::string> seen;
  for (const auto& part : parts) {
    for (const auto& dp : part.items) {
      if (!seen.insert(dp.id).second) throw InputError("concat: duplicate id '" + dp.id + "'");
      out.items.push_back(dp);
    }
  }
  return out;
}

}  // namespace cueaudit::corpus
