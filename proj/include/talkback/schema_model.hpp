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

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "talkback/template_engine.hpp"
#include "talkback/text.hpp"

namespace talkback {

struct NounForms {
  std::string singular;
  std::string plural;
  bool operator==(const NounForms&) const = default;
};

struct RelationNode {
  std::string name;
  NounForms noun;
  std::string heading_attribute;
  double weight = 1.0;
  std::string short_template;  // empty when absent
  std::string long_template;   // empty when absent
  /// Extra spellings accepted by name lookup (e.g. MOVIES for MOVIE).
  std::vector<std::string> aliases;
  /// Unique keys; the first one is the primary key.
  std::vector<std::vector<std::string>> keys;
  bool operator==(const RelationNode&) const = default;
};

enum class ValueType { Text, Integer };

struct AttributeNode {
  std::string relation;
  std::string name;
  bool is_heading = false;
  double weight = 1.0;
  NounForms noun;
  ValueType type = ValueType::Text;
  /// Superlatives read as earliest/latest instead of smallest/largest.
  bool temporal = false;
  /// Per-attribute comparison wordings, keyed by SQL operator.
  std::map<std::string, std::string> lexicon;
  bool operator==(const AttributeNode&) const = default;
};

struct ProjectionEdge {
  std::string relation;
  std::string attribute;
  std::string template_text;  // empty when the attribute has no clause template
  bool operator==(const ProjectionEdge&) const = default;
};

/// A query-translation phrase attached to a join edge or join path. `anchor`
/// names the relation already present in the sentence; the phrase describes
/// how the other end attaches to it.
struct QueryPhrase {
  enum class Position { After, Before };
  std::string anchor;
  std::string text;
  std::string plural_text;  // used when the anchor is a plural noun; empty = same as text
  Position position = Position::After;
  bool operator==(const QueryPhrase&) const = default;
};

struct JoinEdge {
  std::string from_relation;  // foreign-key side
  std::string to_relation;    // primary-key side
  std::string from_key;
  std::string to_key;
  std::string template_text;
  std::string relative_clause;
  std::string procedural_template;
  std::vector<QueryPhrase> phrases;
  bool operator==(const JoinEdge&) const = default;
};

struct JoinPathTemplate {
  std::vector<std::string> path;
  std::string template_text;
  std::string procedural_template;
  std::vector<QueryPhrase> phrases;
  bool operator==(const JoinPathTemplate&) const = default;
};

enum class Severity { Error, Warning };

enum class DiagnosticKind {
  DanglingReference,
  MissingHeading,
  DuplicateName,
  NegativeWeight,
  BadTemplate,
  MissingProjection,
  BadJoinPath,
  Disconnected,
  EmptySchema,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagnosticKind kind = DiagnosticKind::DanglingReference;
  std::string subject;  // offending node or edge
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

/// Annotated schema graph: relation and attribute nodes, projection edges
/// carrying clause templates, and PK-FK join edges carrying relationship
/// templates. Immutable after loading.
struct SchemaGraph {
  std::vector<RelationNode> relations;
  std::vector<AttributeNode> attributes;
  std::vector<ProjectionEdge> projections;
  std::vector<JoinEdge> joins;
  std::vector<JoinPathTemplate> join_paths;
  /// Named list-loop definitions (`DEFINE NAME AS ...`) usable from any template.
  std::vector<std::string> definitions;
  /// Warnings attached at load time.
  std::vector<Diagnostic> diagnostics;

  bool operator==(const SchemaGraph&) const = default;

  /// Case-insensitive lookup by name or alias.
  const RelationNode* find_relation(std::string_view name) const;
  const AttributeNode* find_attribute(std::string_view relation, std::string_view attribute) const;
  const ProjectionEdge* find_projection(std::string_view relation, std::string_view attribute) const;
  std::vector<const AttributeNode*> attributes_of(std::string_view relation) const;
  /// True when the attribute is a key column of some join edge.
  bool is_join_key(std::string_view relation, std::string_view attribute) const;
  /// Join edges touching `relation`, in declaration order.
  std::vector<const JoinEdge*> joins_of(std::string_view relation) const;
  /// The join path whose relation sequence equals `path` in either direction.
  const JoinPathTemplate* find_join_path(const std::vector<std::string>& path) const;
  /// Edge whose key pair matches (a.attr_a, b.attr_b) in either orientation.
  const JoinEdge* find_join(std::string_view rel_a, std::string_view attr_a, std::string_view rel_b,
                            std::string_view attr_b) const;
  /// Parsed named definitions.
  TemplateDefinitions parsed_definitions() const;
  /// Parses a template under this graph's definitions.
  TemplateExpr parse(std::string_view template_text) const;
};

SchemaGraph load_schema(std::istream& source);
SchemaGraph load_schema_text(std::string_view source);
SchemaGraph load_schema_file(const std::filesystem::path& path);

/// JSON document that load_schema maps back to an equal graph.
std::string serialize_schema(const SchemaGraph& graph);

/// One diagnostic per invariant violation; warnings included.
std::vector<Diagnostic> validate(const SchemaGraph& graph);

/// Graphviz rendering: one node per relation, one edge per join edge.
std::string emit_dot(const SchemaGraph& graph);

}  // namespace talkback
