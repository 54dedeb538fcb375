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

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cueaudit::prompts {

enum class TemplateKind { launder, regen, criterion, judge_safety, judge_practicality, judge_plain };

std::string_view to_string(TemplateKind kind);

// Placeholders a template of a given kind must contain and may contain.
struct SlotSpec {
  std::set<std::string> required;
  std::set<std::string> optional;
};

SlotSpec slots_for(TemplateKind kind);

// Text with {name} placeholders, name = [a-z_][a-z0-9_]*. "{{" and "}}"
// produce literal braces. Substituted values are inserted verbatim and never
// rescanned.
class PromptTemplate {
 public:
  // Throws ConfigError for malformed braces, a placeholder outside the
  // kind's slots, or a missing required placeholder; the message names it.
  static PromptTemplate parse(std::string_view text, TemplateKind kind);

  TemplateKind kind() const { return kind_; }
  const std::set<std::string>& placeholders() const { return names_; }
  bool has(const std::string& name) const { return names_.contains(name); }

  // Every placeholder must have a value; extra values are an error too.
  std::string render(const std::map<std::string, std::string>& values) const;

 private:
  struct Segment {
    bool slot = false;
    std::string text;
  };

  TemplateKind kind_ = TemplateKind::launder;
  std::vector<Segment> segments_;
  std::set<std::string> names_;
};

PromptTemplate load_template(const std::filesystem::path& path, TemplateKind kind);

// Shipped neutral template for `kind`, read from the asset directory.
PromptTemplate default_template(TemplateKind kind);

std::filesystem::path asset_dir();

// One few-shot example: an input and the desired output.
struct DemoPair {
  std::string input;
  std::string output;
  bool operator==(const DemoPair&) const = default;
};

// JSONL; both keys required and non-empty on every line.
std::vector<DemoPair> parse_demos(std::string_view content, const std::string& input_key = "original",
                                  const std::string& output_key = "revision");
std::vector<DemoPair> load_demos(const std::filesystem::path& path,
                                 const std::string& input_key = "original",
                                 const std::string& output_key = "revision");

// "Example 1\nOriginal: ...\n<label>: ...\n\nExample 2 ..." in list order.
std::string render_demos(std::span<const DemoPair> demos, std::string_view output_label);

// "Attempt <iteration>: <text>" blocks, in the given order.
std::string render_failed(std::span<const std::pair<int, std::string>> attempts);

}  // namespace cueaudit::prompts
