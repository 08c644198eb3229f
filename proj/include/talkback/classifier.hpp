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

#include <optional>
#include <string>
#include <vector>

#include "talkback/query_graph.hpp"

namespace talkback {

enum class QueryClassLabel {
  Path,
  Subgraph,
  GraphMultiInstance,
  GraphCyclic,
  NestedFlattenable,
  NestedGeneral,
  Aggregate,
  HigherOrder,
};

std::string_view to_string(QueryClassLabel label);
std::optional<QueryClassLabel> parse_class_label(std::string_view text);

struct QueryClass {
  QueryClassLabel label = QueryClassLabel::Path;
  /// Which rule fired and why; never empty.
  std::vector<std::string> evidence;
};

/// Most specific class, checked in this order: HigherOrder, Aggregate,
/// NestedFlattenable, NestedGeneral, GraphCyclic, GraphMultiInstance, Path,
/// Subgraph. `schema` only sharpens the motif evidence.
QueryClass classify(const qg::QueryGraph& g, const SchemaGraph* schema = nullptr);

}  // namespace talkback
