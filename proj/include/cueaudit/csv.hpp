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

#include <string>
#include <string_view>
#include <vector>

namespace cueaudit::csv {

using Row = std::vector<std::string>;

// Parses RFC-4180 text: quoted fields, doubled-quote escapes, embedded
// newlines inside quotes, LF or CRLF record separators. A trailing newline
// does not produce an empty record. Throws InputError on an unterminated
// quoted field.
std::vector<Row> parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Joins escaped fields with commas (no line terminator).
std::string format_row(const std::vector<std::string>& fields);

}  // namespace cueaudit::csv
