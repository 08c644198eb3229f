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

#include "talkback/data_store.hpp"
#include "talkback/schema_model.hpp"

namespace talkback {

enum class NarrationMode { Declarative, Procedural };

std::string_view to_string(NarrationMode mode);

struct NarrationPlan {
  std::string start_relation;  // empty: relation with the greatest weight
  NarrationMode mode = NarrationMode::Declarative;
  std::size_t tuple_budget = 10;
  /// Applied to every relation that has the rank attribute; others keep load order.
  RankSpec rank;
  /// When set, only these relations are narrated (relays stay passable).
  /// When unset, relations of weight 0 are left out.
  std::optional<std::set<std::string, text::ILess>> relation_filter;
};

struct PatternInstance {
  enum class Kind { Unary, Join, Split };
  Kind kind = Kind::Unary;
  /// unary: {from, to}; join: {from, already-visited}; split: {hub, branch...}
  std::vector<std::string> relations;
  std::optional<std::string> relay;
  bool operator==(const PatternInstance&) const = default;
};

std::string_view to_string(PatternInstance::Kind kind);

struct Narrative {
  std::vector<std::string> sentences;
  NarrationMode mode_used = NarrationMode::Declarative;
  std::vector<std::string> diagnostics;
  std::vector<PatternInstance> patterns;
  /// Rows chosen by the planner, per relation.
  std::map<std::string, std::set<std::size_t>, text::ILess> selected_rows;
  /// Rows that were handed to template instantiation, per relation.
  std::map<std::string, std::set<std::size_t>, text::ILess> bound_rows;

  std::string text() const;
};

/// Root relation the plan resolves to. Throws UnknownStart.
std::string resolve_start(const SchemaGraph& graph, const NarrationPlan& plan);

/// True for relations that only connect others: no templates of their own,
/// never referenced by a template, and at least two join edges.
bool is_relay(const SchemaGraph& graph, std::string_view relation);

std::vector<PatternInstance> detect_patterns(const SchemaGraph& graph, const NarrationPlan& plan);

NarrationMode fallback_mode(const SchemaGraph& graph, const NarrationPlan& plan);

Narrative narrate(const SchemaGraph& graph, const Database& db, const NarrationPlan& plan);

}  // namespace talkback
