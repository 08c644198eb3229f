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
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "talkback/box.hpp"
#include "talkback/text.hpp"

namespace talkback {

struct Tuple;
struct SchemaGraph;

// Template mini-language
// ----------------------
//   template  := "" | part ('+' part)*
//   part      := "literal" | '{' placeholder '}' | DEFINE-loop | LIST_NAME
//   placeholder := ATTR | ALIAS '.' ATTR | ALIAS ':' variant | ALIAS '.' ATTR ':' variant
//   loop      := DEFINE NAME AS guarded guarded
//   guarded   := '[' i '<' arityOf(ALIAS) ']' ("conn" '+')* '{' template '}'   (first)
//              | '[' i '=' arityOf(ALIAS) ']' ("conn" '+')* '{' template '}'   (second)
// Connector literals in front of a guarded body are emitted only when the
// current element is not the first one of the list.

enum class PlaceholderVariant { Value, Noun, Heading };

struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};

struct Placeholder {
  std::string alias;      // empty: resolved against whatever binding owns `attribute`
  std::string attribute;  // empty for Noun/Heading placeholders on a bare alias
  PlaceholderVariant variant = PlaceholderVariant::Value;
  bool operator==(const Placeholder&) const = default;
};

struct ListLoop;

using TemplatePart = std::variant<Literal, Placeholder, Box<ListLoop>>;

struct TemplateExpr {
  std::vector<TemplatePart> parts;
  bool empty() const { return parts.empty(); }
  bool operator==(const TemplateExpr&) const = default;
};

enum class Guard { LessThanArity, EqualsArity };

struct GuardedBody {
  Guard guard = Guard::LessThanArity;
  std::vector<std::string> connectors;
  TemplateExpr body;
  bool operator==(const GuardedBody&) const = default;
};

struct ListLoop {
  std::string name;
  std::string arity_alias;
  std::string arity_attribute;  // optional, kept for re-serialization only
  std::vector<GuardedBody> guards;  // exactly {LessThanArity, EqualsArity}
  bool referenced = false;          // spelled as a bare name in the source text
  bool operator==(const ListLoop&) const = default;
};

using TemplateDefinitions = std::map<std::string, ListLoop, text::ILess>;

/// Parses template text. Bare names resolve against `definitions`.
TemplateExpr parse_template(std::string_view source, const TemplateDefinitions& definitions = {});
/// Parses a standalone `DEFINE NAME AS ...` list definition.
ListLoop parse_definition(std::string_view source, const TemplateDefinitions& definitions = {});

std::string to_string(const TemplateExpr& expr);
std::string to_string(const ListLoop& loop);

/// Every placeholder in `expr`, loop bodies included, in source order.
std::vector<Placeholder> collect_placeholders(const TemplateExpr& expr);

/// Supplies values for placeholders during instantiation.
class PlaceholderSource {
 public:
  virtual ~PlaceholderSource() = default;
  /// Number of items bound to `alias`. Throws UnboundAlias when absent.
  virtual std::size_t arity(std::string_view alias) const = 0;
  /// Text for `placeholder`, taken from item `index` of its alias.
  virtual std::string render(const Placeholder& placeholder, std::string_view alias,
                             std::size_t index) const = 0;
  /// Alias that an unqualified placeholder refers to.
  virtual std::string resolve_alias(const Placeholder& placeholder) const;
};

std::string instantiate(const TemplateExpr& expr, const PlaceholderSource& source);

using TupleBindings = std::map<std::string, std::vector<const Tuple*>, text::ILess>;

/// Instantiates against tuple lists. `schema` is needed for the noun and
/// heading variants.
std::string instantiate(const TemplateExpr& expr, const TupleBindings& bindings,
                        const SchemaGraph* schema = nullptr);

/// A sentence fragment split into whitespace tokens; the first `subject_len`
/// tokens form its grammatical subject.
struct Clause {
  std::vector<std::string> tokens;
  std::size_t subject_len = 0;

  static Clause from_text(std::string_view text, std::size_t subject_len);
  std::string text() const;
  bool operator==(const Clause&) const = default;
};

/// Fuses runs of adjacent clauses that share a common token prefix covering
/// their subjects: prefix + remainders in input order. Repeats until no run
/// can be fused, so the result is a fixed point.
std::vector<Clause> merge_common(std::vector<Clause> clauses);

}  // namespace talkback
