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
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "talkback/schema_model.hpp"
#include "talkback/text.hpp"

namespace talkback {

struct Tuple {
  std::string relation;  // canonical relation name
  /// Values in the relation's declared attribute order.
  std::vector<std::pair<std::string, Cell>> values;
  /// Position in load order within its table.
  std::size_t row = 0;

  const Cell* find(std::string_view attribute) const;
  /// Like find, but throws UnknownAttribute.
  const Cell& at(std::string_view attribute) const;
  bool operator==(const Tuple&) const = default;
};

/// Relation name (canonical spelling) -> tuples in load order.
struct Database {
  std::map<std::string, std::vector<Tuple>, text::ILess> tables;

  /// Throws UnknownRelation.
  const std::vector<Tuple>& table(std::string_view relation) const;
  bool operator==(const Database&) const = default;
};

/// One CSV stream per relation name. Relations of the graph without a stream
/// get an empty table.
Database load_data(const SchemaGraph& graph, const std::map<std::string, std::istream*, text::ILess>& streams);

/// Reads `<RELATION>.csv` files from `directory`.
Database load_data_dir(const SchemaGraph& graph, const std::filesystem::path& directory);

/// RFC-4180 records. Throws MalformedDocument on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Tuples of the other endpoint of `edge` whose key equals t's key.
/// Throws WrongRelation when t belongs to neither endpoint.
std::vector<const Tuple*> follow_join(const Database& db, const SchemaGraph& graph, const JoinEdge& edge,
                                      const Tuple& t);

struct RankSpec {
  std::string attribute;  // empty: load order
  bool descending = false;

  static RankSpec load_order() { return {}; }
  /// Parses "attr", "attr:asc", "attr:desc" or "load-order".
  static RankSpec parse(std::string_view text);
};

/// Orders cells for ranking: nulls first, integers numerically, otherwise text.
int compare_cells(const Cell& a, const Cell& b);

/// Stable sort of `tuples` by `rank`; ties keep their relative order.
void rank_tuples(std::vector<const Tuple*>& tuples, const RankSpec& rank);

/// At most `budget` tuples of `relation` in rank order.
std::vector<const Tuple*> select_tuples(const Database& db, const SchemaGraph& graph, std::string_view relation,
                                        std::size_t budget, const RankSpec& rank);

}  // namespace talkback
