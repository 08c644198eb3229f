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

#include <cstdint>
#include <string>
#include <vector>

#include "talkback/data_store.hpp"
#include "talkback/schema_model.hpp"
#include "talkback/sql_frontend.hpp"

namespace talkback {

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool operator==(const ResultSet&) const = default;
};

/// Same columns and the same rows with the same multiplicities.
bool same_multiset(const ResultSet& a, const ResultSet& b);

/// Tab-separated rendering with a header line; nulls print as NULL.
std::string to_string(const ResultSet& r);

/// Nested-loop evaluation of a name-resolved query. Comparisons involving
/// NULL are false; `op ALL` over an empty subquery is true; a scalar
/// subquery yields NULL when empty and throws EvaluationError when it
/// returns more than one row.
ResultSet evaluate(const sql::Query& resolved, const Database& db);

/// Deterministic random tables: at most `max_rows` rows each, declared keys
/// unique, foreign-key cells drawn from the referenced keys with probability
/// 0.8, four values per non-key column. Text constants from `seeds` are
/// placed in the text domains so that query filters can match.
Database random_database(const SchemaGraph& graph, std::uint64_t seed, std::size_t max_rows,
                         const std::vector<Cell>& seeds = {});

/// Constants appearing anywhere in `q`, subqueries included.
std::vector<Cell> query_constants(const sql::Query& q);

}  // namespace talkback
