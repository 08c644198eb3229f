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

#include "talkback/classifier.hpp"

#include <array>

#include "talkback/rewriter.hpp"

namespace talkback {

namespace {

constexpr std::array<std::pair<QueryClassLabel, std::string_view>, 8> kLabels = {{
    {QueryClassLabel::Path, "Path"},
    {QueryClassLabel::Subgraph, "Subgraph"},
    {QueryClassLabel::GraphMultiInstance, "GraphMultiInstance"},
    {QueryClassLabel::GraphCyclic, "GraphCyclic"},
    {QueryClassLabel::NestedFlattenable, "NestedFlattenable"},
    {QueryClassLabel::NestedGeneral, "NestedGeneral"},
    {QueryClassLabel::Aggregate, "Aggregate"},
    {QueryClassLabel::HigherOrder, "HigherOrder"},
}};

// Every nesting below `g` is an uncorrelated IN in WHERE over one column.
bool only_uncorrelated_in(const qg::QueryGraph& g, std::string& why) {
  for (const auto& n : g.nested) {
    if (n.connector != qg::Connector::In) {
      why = "nesting connector '" + std::string(qg::to_string(n.connector)) + "' is not IN";
      return false;
    }
    if (n.site != qg::Site::Where) {
      why = "IN nesting sits in " + std::string(qg::to_string(n.site));
      return false;
    }
    if (n.correlated) {
      why = "an IN subquery is correlated with its enclosing query";
      return false;
    }
    if (n.child->select_star || n.child->projections.size() != 1) {
      why = "an IN subquery does not select exactly one column";
      return false;
    }
    if (!only_uncorrelated_in(*n.child, why)) return false;
  }
  return true;
}

std::string describe(const Motif& m) {
  std::string out = std::string(to_string(m.kind)) + " motif at " + m.anchor;
  std::vector<std::string> params;
  for (const auto& [k, v] : m.params) params.push_back(k + "=" + v);
  return out + " (" + text::join(params, ", ") + ")";
}

}  // namespace

std::string_view to_string(QueryClassLabel label) {
  for (const auto& [l, name] : kLabels) {
    if (l == label) return name;
  }
  return "?";
}

std::optional<QueryClassLabel> parse_class_label(std::string_view text) {
  for (const auto& [l, name] : kLabels) {
    if (text::iequals(name, text)) return l;
  }
  return std::nullopt;
}

QueryClass classify(const qg::QueryGraph& g, const SchemaGraph* schema) {
  QueryClass c;
  qg::Shape s = qg::shape(g);
  std::vector<Motif> motifs = detect_motifs(g, schema);

  std::vector<std::string> higher;
  for (const auto& m : motifs) {
    if (is_higher_order(m)) higher.push_back(describe(m));
  }
  if (!higher.empty()) {
    c.label = QueryClassLabel::HigherOrder;
    c.evidence.push_back("higher-order motif detected: " + text::join(higher, "; "));
    if (s.aggregate) c.evidence.push_back("syntactically an aggregate query, but the motif dominates its meaning");
    return c;
  }
  if (s.aggregate) {
    c.label = QueryClassLabel::Aggregate;
    c.evidence.push_back(g.group_note.empty() ? "count aggregate present" : "group note and aggregation present");
    if (s.cyclic) c.evidence.push_back("the join core is also cyclic; GraphCyclic would apply without the aggregate");
    if (!g.nested.empty()) c.evidence.push_back("nested query present; aggregation takes precedence");
    return c;
  }
  if (!g.nested.empty()) {
    std::string why;
    if (only_uncorrelated_in(g, why)) {
      c.label = QueryClassLabel::NestedFlattenable;
      c.evidence.push_back("IN is the only nesting connector and every IN subquery is uncorrelated");
    } else {
      c.label = QueryClassLabel::NestedGeneral;
      c.evidence.push_back("nesting is not flattenable: " + why);
      for (const auto& m : motifs) c.evidence.push_back(describe(m));
    }
    return c;
  }
  if (s.cyclic) {
    c.label = QueryClassLabel::GraphCyclic;
    c.evidence.push_back("equality joins close an undirected cycle");
    if (s.multi_instance) c.evidence.push_back("also multi-instance");
    return c;
  }
  if (s.multi_instance) {
    c.label = QueryClassLabel::GraphMultiInstance;
    std::map<std::string, std::vector<std::string>, text::ILess> per_relation;
    for (const auto& n : g.nodes) per_relation[n.relation].push_back(n.alias);
    for (const auto& [rel, aliases] : per_relation) {
      if (aliases.size() > 1) c.evidence.push_back(rel + " appears as " + text::join(aliases, ", "));
    }
    return c;
  }
  if (g.nodes.size() <= 1) {
    c.label = QueryClassLabel::Path;
    c.evidence.push_back("single relation: a path of length 0");
    return c;
  }
  if (s.simple_path) {
    c.label = QueryClassLabel::Path;
    c.evidence.push_back("acyclic, one instance per relation, join degree at most 2, joins form a simple path");
    return c;
  }
  c.label = QueryClassLabel::Subgraph;
  c.evidence.push_back("acyclic and single-instance, but not a simple path (max join degree " +
                       std::to_string(s.max_degree) + ")");
  return c;
}

}  // namespace talkback
