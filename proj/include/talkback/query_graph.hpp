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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "talkback/box.hpp"
#include "talkback/schema_model.hpp"
#include "talkback/sql_frontend.hpp"

namespace talkback::qg {

struct SelectElement {
  std::string attribute;     // "count(distinct year)" for an aggregate over this node
  std::string output_alias;  // empty when absent
  bool aggregate = false;
  bool operator==(const SelectElement&) const = default;
};

/// One tuple variable: the parameterized class of a relation under an alias.
struct QueryNode {
  std::string alias;
  std::string relation;
  std::vector<SelectElement> select_part;
  /// Predicates over this alias alone (usually column op constant).
  std::vector<sql::Compare> where_part;
  std::vector<sql::Compare> having_part;
  bool operator==(const QueryNode&) const = default;
};

struct QueryJoinEdge {
  std::string from_alias;
  std::string from_attribute;
  std::string to_alias;
  std::string to_attribute;
  sql::CompareOp op = sql::CompareOp::Eq;
  bool fk_backed = false;
  /// `to_alias` lives in an enclosing query, `to_level` scopes up.
  bool crosses_nesting = false;
  std::size_t to_level = 0;
  bool in_having = false;
  bool operator==(const QueryJoinEdge&) const = default;
};

enum class Connector { In, Exists, NotExists, CompareAll, Scalar };
enum class Site { Select, Where, Having };

std::string_view to_string(Connector c);
std::string_view to_string(Site s);

struct QueryGraph;

struct NestedQuery {
  Connector connector = Connector::In;
  Site site = Site::Where;
  /// The predicate holding the subquery; absent for select-list subqueries.
  std::optional<sql::Atom> atom;
  Box<QueryGraph> child;
  /// The child (or anything below it) refers to an enclosing query.
  bool correlated = false;
  bool operator==(const NestedQuery&) const;
};

struct QueryGraph {
  std::vector<QueryNode> nodes;
  std::vector<QueryJoinEdge> joins;
  std::vector<sql::ColumnRef> group_note;
  std::vector<sql::OrderItem> order_note;
  std::vector<NestedQuery> nested;
  bool select_star = false;
  std::vector<sql::SelectItem> projections;
  /// Predicates that mention only enclosing aliases.
  std::vector<sql::Compare> outer_filters;
  /// Having predicates spanning several aliases or none (e.g. count(*) > 1),
  /// and where predicates without any column.
  std::vector<sql::Compare> residual;
  /// The resolved query this graph was built from.
  sql::Query source;

  bool operator==(const QueryGraph&) const = default;

  const QueryNode* find_node(std::string_view alias) const;
};

/// Builds the graph of a name-resolved query.
QueryGraph build(const sql::Query& resolved, const SchemaGraph& graph);

/// Nodes of the graph and of every nested child.
std::size_t total_nodes(const QueryGraph& g);
/// Predicates placed in this graph and its children, one per atom.
std::size_t placed_predicates(const QueryGraph& g);

/// True when some column inside `q` reaches past `q` itself.
bool is_correlated(const sql::Query& q);

struct Shape {
  /// Local join edges per alias (nesting-crossing edges excluded).
  std::map<std::string, std::size_t, text::ILess> degree;
  std::size_t max_degree = 0;
  bool multi_instance = false;
  /// Undirected cycle among local equality joins.
  bool cyclic = false;
  /// All local joins form one simple path over all nodes.
  bool simple_path = false;
  std::set<Connector> connectors;
  bool correlated_nesting = false;
  /// count(...) anywhere, or a group note.
  bool aggregate = false;
};

Shape shape(const QueryGraph& g);

/// Graphviz rendering: record nodes with FROM/SELECT/WHERE/HAVING parts,
/// note nodes for grouping and ordering, clusters for nested queries.
std::string emit_dot(const QueryGraph& g);

}  // namespace talkback::qg
