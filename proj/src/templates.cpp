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

#include "cueaudit/templates.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cueaudit/error.hpp"
#include "json.hpp"

namespace cueaudit::prompts {

namespace {

bool name_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool name_char(char c) { return name_start(c) || (c >= '0' && c <= '9'); }

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::launder: return "launder";
    case TemplateKind::regen: return "regen";
    case TemplateKind::criterion: return "criterion";
    case TemplateKind::judge_safety: return "judge_safety";
    case TemplateKind::judge_practicality: return "judge_practicality";
    case TemplateKind::judge_plain: return "judge_plain";
  }
  return "launder";
}

SlotSpec slots_for(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::launder: return {{"data_point"}, {"demos"}};
    case TemplateKind::regen: return {{"data_point", "failed_revisions"}, {"demos"}};
    case TemplateKind::criterion: return {{"data_point"}, {"demos"}};
    case TemplateKind::judge_safety:
    case TemplateKind::judge_practicality: return {{"criterion", "response"}, {}};
    case TemplateKind::judge_plain: return {{"response"}, {}};
  }
  return {};
}

PromptTemplate PromptTemplate::parse(std::string_view text, TemplateKind kind) {
  PromptTemplate t;
  t.kind_ = kind;
  const auto spec = slots_for(kind);
  const std::string where = std::string(to_string(kind)) + " template";
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) t.segments_.push_back({false, std::move(literal)});
    literal.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      literal.push_back('{');
      ++i;
    } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      literal.push_back('}');
      ++i;
    } else if (c == '{') {
      std::size_t j = i + 1;
      if (j >= text.size() || !name_start(text[j])) {
        throw ConfigError(where + ": malformed placeholder at offset " + std::to_string(i));
      }
      while (j < text.size() && name_char(text[j])) ++j;
      if (j >= text.size() || text[j] != '}') {
        throw ConfigError(where + ": unterminated placeholder at offset " + std::to_string(i));
      }
      std::string name(text.substr(i + 1, j - i - 1));
      if (!spec.required.contains(name) && !spec.optional.contains(name)) {
        throw ConfigError(where + ": unknown placeholder {" + name + "}");
      }
      flush();
      t.names_.insert(name);
      t.segments_.push_back({true, std::move(name)});
      i = j;
    } else if (c == '}') {
      throw ConfigError(where + ": stray '}' at offset " + std::to_string(i));
    } else {
      literal.push_back(c);
    }
  }
  flush();
  for (const auto& name : spec.required) {
    if (!t.names_.contains(name)) throw ConfigError(where + ": missing placeholder {" + name + "}");
  }
  return t;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  for (const auto& [name, _] : values) {
    if (!names_.contains(name)) {
      throw PreconditionError(std::string(to_string(kind_)) + " template has no placeholder {" +
                              name + "}");
    }
  }
  std::string out;
  for (const auto& seg : segments_) {
    if (!seg.slot) {
      out += seg.text;
      continue;
    }
    auto it = values.find(seg.text);
    if (it == values.end()) {
      throw PreconditionError(std::string(to_string(kind_)) + " template: no value for {" +
                              seg.text + "}");
    }
    out += it->second;
  }
  return out;
}

PromptTemplate load_template(const std::filesystem::path& path, TemplateKind kind) {
  return PromptTemplate::parse(read_file(path, "template"), kind);
}

std::filesystem::path asset_dir() {
  if (const char* env = std::getenv("CUEAUDIT_ASSETS"); env && *env) return env;
  return CUEAUDIT_ASSET_DIR;
}

PromptTemplate default_template(TemplateKind kind) {
  return load_template(asset_dir() / "templates" / (std::string(to_string(kind)) + ".txt"), kind);
}

std::vector<DemoPair> parse_demos(std::string_view content, const std::string& input_key,
                                  const std::string& output_key) {
  std::vector<DemoPair> demos;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "demonstrations line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      DemoPair d{j.at(input_key).get<std::string>(), j.at(output_key).get<std::string>()};
      if (d.input.empty() || d.output.empty()) throw InputError(where + ": empty field");
      demos.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return demos;
}

std::vector<DemoPair> load_demos(const std::filesystem::path& path, const std::string& input_key,
                                 const std::string& output_key) {
  return parse_demos(read_file(path, "demonstrations"), input_key, output_key);
}

std::string render_demos(std::span<const DemoPair> demos, std::string_view output_label) {
  std::string out;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    if (i) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + "\nOriginal: " + demos[i].input + "\n";
    out += std::string(output_label) + ": " + demos[i].output;
  }
  return out;
}

std::string render_failed(std::span<const std::pair<int, std::string>> attempts) {
  std::string out;
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    if (i) out += "\n\n";
    out += "Attempt " + std::to_string(attempts[i].first) + ": " + attempts[i].second;
  }
  return out;
}

}  // namespace cueaudit::prompts
