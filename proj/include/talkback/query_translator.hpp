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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "talkback/classifier.hpp"
#include "talkback/query_graph.hpp"
#include "talkback/schema_model.hpp"
#include "talkback/sql_frontend.hpp"

namespace talkback {

enum class TranslationStyle { Declarative, Procedural };

std::string_view to_string(TranslationStyle style);

struct TranslationResult {
  std::string text;
  TranslationStyle style = TranslationStyle::Declarative;
  QueryClass class_used;
  std::vector<std::string> notes;
};

/// User-supplied phrase for a small query-graph shape. A pattern matches when
/// every given field matches: the class label, the number of tuple variables
/// per relation, and the projected REL.attribute list in select order.
struct MotifPattern {
  std::optional<QueryClassLabel> label;
  std::map<std::string, std::size_t, text::ILess> relations;
  std::vector<std::string> projections;
  std::string phrase;
};

/// Parses a JSON list of {"shape": {...}, "phrase": "..."}. Throws
/// MalformedDocument.
std::vector<MotifPattern> load_motif_patterns(std::string_view json_text);

bool matches(const MotifPattern& pattern, const qg::QueryGraph& g, const QueryClass& cls);

/// Default wording of a comparison operator, or the attribute's own wording
/// when its lexicon has one.
std::string operator_phrase(sql::CompareOp op, const AttributeNode* attribute = nullptr);

/// Declarative text where the class allows it, numbered steps otherwise.
/// Never throws for a graph built from a resolved query.
TranslationResult translate(const qg::QueryGraph& g, const SchemaGraph& schema, const QueryClass& cls,
                            const std::vector<MotifPattern>& patterns = {});

/// Numbered imperative steps: scan, FK combination, other joins, filters,
/// nested conditions, grouping, having, ordering, report.
TranslationResult translate_procedural(const qg::QueryGraph& g, const SchemaGraph& schema);

/// One predicate of `scope` (its WHERE or HAVING) in words. Repeated
/// relations are told apart by FROM order: "the first employee".
std::string lexicalize_predicate(const sql::Atom& atom, const sql::Query& scope, const SchemaGraph& schema);

}  // namespace talkback
