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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "talkback/box.hpp"
#include "talkback/schema_model.hpp"
#include "talkback/text.hpp"

namespace talkback::sql {

struct Query;

struct ColumnRef {
  std::string alias;  // empty until qualified
  std::string attribute;
  /// 0 = the query's own FROM list, 1 = the enclosing query, ... (set by resolve_names)
  std::size_t outer_level = 0;
  bool operator==(const ColumnRef&) const = default;
};

struct Constant {
  Cell value;
  bool operator==(const Constant&) const = default;
};

struct CountStar {
  bool operator==(const CountStar&) const = default;
};

struct CountDistinct {
  ColumnRef column;
  bool operator==(const CountDistinct&) const = default;
};

/// `(select ...)` used as a value.
struct ScalarSubquery {
  Box<Query> query;
  bool operator==(const ScalarSubquery&) const = default;
};

using Expr = std::variant<ColumnRef, Constant, CountStar, CountDistinct, ScalarSubquery>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);
/// Operator with its operands swapped: a < b  <=>  b > a.
CompareOp mirror(CompareOp op);
bool is_aggregate(const Expr& e);

struct Compare {
  Expr lhs;
  CompareOp op = CompareOp::Eq;
  Expr rhs;
  bool operator==(const Compare&) const = default;
};

struct InSubquery {
  Expr lhs;
  Box<Query> query;
  bool operator==(const InSubquery&) const = default;
};

struct Exists {
  bool negated = false;
  Box<Query> query;
  bool operator==(const Exists&) const = default;
};

struct CompareAll {
  Expr lhs;
  CompareOp op = CompareOp::Eq;
  Box<Query> query;
  bool operator==(const CompareAll&) const = default;
};

/// One conjunct of a WHERE or HAVING clause.
using Atom = std::variant<Compare, InSubquery, Exists, CompareAll>;

struct SelectItem {
  Expr expr;
  std::string alias;  // empty when absent
  bool operator==(const SelectItem&) const = default;
};

struct FromItem {
  std::string relation;
  std::string alias;  // defaults to the relation name
  bool operator==(const FromItem&) const = default;
};

struct OrderItem {
  ColumnRef column;
  bool descending = false;
  bool operator==(const OrderItem&) const = default;
};

struct Query {
  bool select_star = false;
  std::vector<SelectItem> select;
  std::vector<FromItem> from;
  std::vector<Atom> where;  // conjunction; empty = no WHERE
  std::vector<ColumnRef> group_by;
  std::vector<Atom> having;  // conjunction; empty = no HAVING
  std::vector<OrderItem> order_by;
  bool operator==(const Query&) const = default;

  const FromItem* find_alias(std::string_view alias) const;
};

/// Parses the supported subset. Throws SyntaxError (with position and
/// expected tokens) or Unsupported.
Query parse_sql(std::string_view text);

/// Qualifies every column, checks it against the schema, canonicalizes
/// relation and attribute spellings and fills in outer_level.
/// Throws UnknownRelation, UnknownColumn or AmbiguousColumn.
Query resolve_names(const Query& query, const SchemaGraph& graph);

/// Canonical SQL text; parse_sql(to_sql(q)) == q.
std::string to_sql(const Query& query);
std::string to_sql(const Expr& expr);
std::string to_sql(const Atom& atom);

/// Subqueries directly inside an atom or expression (not recursive).
std::vector<const Query*> subqueries(const Atom& atom);

/// Number of atoms in where and having, counted through nested queries.
std::size_t count_atoms(const Query& query);

}  // namespace talkback::sql
