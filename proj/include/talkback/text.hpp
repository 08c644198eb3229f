// Copyright 2026 The talkback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace talkback {

/// A table cell. monostate is SQL NULL.
using Cell = std::variant<std::monostate, std::int64_t, std::string>;

bool is_null(const Cell& cell);
std::string cell_to_string(const Cell& cell);

namespace text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string trim(std::string_view s);

/// Case-insensitive ordering, for maps keyed by SQL/schema identifiers.
struct ILess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

/// Splits on runs of whitespace; punctuation stays glued to its word.
std::vector<std::string> tokenize(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
/// "a", "a and b", "a, b, and c".
std::string join_list(const std::vector<std::string>& items);
/// Collapses whitespace runs into single spaces and trims.
std::string normalize_whitespace(std::string_view s);

std::string pluralize(std::string_view noun);
std::string indefinite_article(std::string_view word);
std::string with_article(std::string_view noun);
/// 1 -> "first", 2 -> "second", ...
std::string ordinal(std::size_t n);

bool ends_with_terminal_punctuation(std::string_view s);
bool parse_int64(std::string_view s, std::int64_t& out);

}  // namespace text
}  // namespace talkback
