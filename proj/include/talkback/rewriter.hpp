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
#include <string>
#include <vector>

#include "talkback/query_graph.hpp"
#include "talkback/sql_frontend.hpp"

namespace talkback {

using qg::NestedQuery;
using qg::QueryGraph;
using qg::QueryJoinEdge;
using qg::QueryNode;

struct Motif {
  enum class Kind { Division, SameValue, SuperlativeAll };
  Kind kind = Kind::Division;
  /// Predicate site the motif was read from, e.g. "where[0]" or "m.having[0]".
  std::string anchor;
  /// Division: range, range_alias, divisor, divisor_alias.
  /// SameValue: alias, relation, attribute.
  /// SuperlativeAll: alias, relation, attribute, direction (min|max), superlative.
  std::map<std::string, std::string> params;
  bool operator==(const Motif&) const = default;
};

std::string_view to_string(Motif::Kind kind);

/// Division, SameValue and SuperlativeAll shapes found in the top-level graph.
/// With a schema, superlatives of temporal attributes read earliest/latest.
std::vector<Motif> detect_motifs(const QueryGraph& g, const SchemaGraph* schema = nullptr);

/// Higher-order motifs are the ones whose meaning the graph alone does not
/// carry (SameValue, SuperlativeAll).
bool is_higher_order(const Motif& m);

/// Empty when `q` qualifies for flattening, else the reason it does not:
/// every subquery must be an uncorrelated IN in WHERE that selects one column
/// and has no grouping, having, ordering or aggregates.
std::string flatten_obstacle(const sql::Query& q);

/// Unnests uncorrelated IN subqueries innermost-first. Child aliases that
/// collide with outer ones get a numeric suffix. Throws NotFlattenable.
sql::Query flatten(const sql::Query& q);

}  // namespace talkback
