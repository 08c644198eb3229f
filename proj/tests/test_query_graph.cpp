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

#include <gtest/gtest.h>

#include "query_gen.hpp"
#include "talkback/query_graph.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::corpus;
using testing::movies;

const std::vector<std::string> kCorpus = {"q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "emp"};

const SchemaGraph& schema_for(const std::string& name) { return name == "emp" ? testing::emp() : movies(); }

qg::QueryGraph graph(const std::string& name) { return qg::build(corpus(name), schema_for(name)); }

std::size_t count_substr(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::size_t from_items(const sql::Query& q) {
  std::size_t n = q.from.size();
  auto atoms = [&](const std::vector<sql::Atom>& as) {
    for (const auto& a : as) {
      for (const sql::Query* s : sql::subqueries(a)) n += from_items(*s);
    }
  };
  atoms(q.where);
  atoms(q.having);
  for (const auto& s : q.select) {
    if (const auto* sq = std::get_if<sql::ScalarSubquery>(&s.expr)) n += from_items(*sq->query);
  }
  return n;
}

TEST(Build, Q1) {
  qg::QueryGraph g = graph("q1");
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.joins.size(), 2u);
  for (const auto& j : g.joins) EXPECT_TRUE(j.fk_backed);
  const qg::QueryNode* a = g.find_node("a");
  ASSERT_NE(a, nullptr);
  ASSERT_EQ(a->where_part.size(), 1u);
  EXPECT_EQ(sql::to_sql(sql::Atom{a->where_part[0]}), "a.name = 'Brad Pitt'");
  EXPECT_EQ(g.find_node("m")->select_part, (std::vector<qg::SelectElement>{{"title", "", false}}));
}

TEST(Build, Q3MultiInstanceWithThetaJoin) {
  qg::QueryGraph g = graph("q3");
  EXPECT_EQ(g.nodes.size(), 5u);
  std::size_t casts = 0, actors = 0;
  for (const auto& n : g.nodes) {
    casts += n.relation == "CAST";
    actors += n.relation == "ACTOR";
  }
  EXPECT_EQ(casts, 2u);
  EXPECT_EQ(actors, 2u);
  auto theta = std::find_if(g.joins.begin(), g.joins.end(), [](const auto& j) { return !j.fk_backed; });
  ASSERT_NE(theta, g.joins.end());
  EXPECT_EQ(theta->op, sql::CompareOp::Gt);
  EXPECT_EQ(theta->from_alias, "a1");
  EXPECT_EQ(theta->to_alias, "a2");
}

TEST(Build, Q7NestedUnderHaving) {
  qg::QueryGraph g = graph("q7");
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.group_note.size(), 2u);
  ASSERT_EQ(g.nested.size(), 1u);
  EXPECT_EQ(g.nested[0].site, qg::Site::Having);
  EXPECT_EQ(g.nested[0].connector, qg::Connector::Scalar);
  EXPECT_TRUE(g.nested[0].correlated);
  const qg::QueryGraph& child = *g.nested[0].child;
  ASSERT_EQ(child.joins.size(), 1u);
  EXPECT_TRUE(child.joins[0].crosses_nesting);
  EXPECT_TRUE(child.joins[0].fk_backed);
  EXPECT_EQ(child.joins[0].to_alias, "m");
}

TEST(Build, Q6NestingEdgesCrossTwoLevels) {
  qg::QueryGraph g = graph("q6");
  ASSERT_EQ(g.nested.size(), 1u);
  EXPECT_EQ(g.nested[0].connector, qg::Connector::NotExists);
  const qg::QueryGraph& inner = *g.nested[0].child->nested[0].child;
  std::set<std::size_t> levels;
  for (const auto& j : inner.joins) levels.insert(j.to_level);
  EXPECT_EQ(levels, (std::set<std::size_t>{1, 2}));
}

TEST(Shape, Q1Q2Q4) {
  qg::Shape s1 = qg::shape(graph("q1"));
  EXPECT_EQ(s1.max_degree, 2u);
  EXPECT_FALSE(s1.multi_instance);
  EXPECT_FALSE(s1.cyclic);
  EXPECT_TRUE(s1.simple_path);

  EXPECT_TRUE(qg::shape(graph("q4")).cyclic);

  qg::Shape s2 = qg::shape(graph("q2"));
  EXPECT_FALSE(s2.cyclic);
  EXPECT_EQ(s2.degree.at("m"), 3u);
  std::size_t degree3 = 0;
  for (const auto& [alias, d] : s2.degree) degree3 += d == 3;
  EXPECT_EQ(degree3, 1u);
}

TEST(Shape, AggregateAndConnectors) {
  EXPECT_TRUE(qg::shape(graph("q7")).aggregate);
  EXPECT_TRUE(qg::shape(graph("q8")).aggregate);
  EXPECT_FALSE(qg::shape(graph("q1")).aggregate);
  EXPECT_EQ(qg::shape(graph("q5")).connectors, std::set<qg::Connector>{qg::Connector::In});
  EXPECT_TRUE(qg::shape(graph("q3")).multi_instance);
}

TEST(EmitDot, Q1HasThreeRecords) {
  std::string dot = qg::emit_dot(graph("q1"));
  EXPECT_EQ(count_substr(dot, "\\<\\<FROM\\>\\>"), 3u);
  EXPECT_EQ(count_substr(dot, "->"), 2u);
}

TEST(EmitDot, Q7HasClusterForNestedQuery) {
  std::string dot = qg::emit_dot(graph("q7"));
  EXPECT_NE(dot.find("subgraph cluster_q1"), std::string::npos);
  EXPECT_NE(dot.find("label=\"NQ1\""), std::string::npos);
  EXPECT_NE(dot.find("GROUP BY"), std::string::npos);
  EXPECT_NE(dot.find("style=dashed"), std::string::npos);
}

TEST(EmitDot, NoWhereMeansNoEdges) {
  qg::QueryGraph g = qg::build(sql::resolve_names(sql::parse_sql("select m.title, a.name from MOVIE m, ACTOR a"), movies()), movies());
  std::string dot = qg::emit_dot(g);
  EXPECT_EQ(count_substr(dot, "->"), 0u);
  EXPECT_EQ(count_substr(dot, "\\<\\<FROM\\>\\>"), 2u);
  EXPECT_EQ(dot, qg::emit_dot(g));
}

TEST(Invariants, CorpusNodeCountAndConservation) {
  for (const auto& name : kCorpus) {
    sql::Query q = corpus(name);
    qg::QueryGraph g = qg::build(q, schema_for(name));
    EXPECT_EQ(qg::total_nodes(g), from_items(q)) << name;
    EXPECT_EQ(qg::placed_predicates(g), sql::count_atoms(q)) << name;
  }
}

void check_fk_flags(const qg::QueryGraph& g, const SchemaGraph& schema) {
  // Node relations for every alias in scope, innermost last.
  for (const auto& j : g.joins) {
    if (j.crosses_nesting) continue;
    const auto* a = g.find_node(j.from_alias);
    const auto* b = g.find_node(j.to_alias);
    ASSERT_TRUE(a && b);
    bool expected = j.op == sql::CompareOp::Eq &&
                    schema.find_join(a->relation, j.from_attribute, b->relation, j.to_attribute) != nullptr;
    EXPECT_EQ(j.fk_backed, expected) << j.from_alias << "." << j.from_attribute << " " << j.to_alias << "."
                                     << j.to_attribute;
  }
  for (const auto& n : g.nested) check_fk_flags(*n.child, schema);
}

TEST(InvariantsProperty, GeneratedQueriesConserveAndFlagJoins) {
  testing::GenOptions opts;
  opts.exists = 0.3;
  opts.in_subquery = 0.3;
  for (std::uint64_t seed = 0; seed < 1500; ++seed) {
    std::string text = testing::QueryGen(movies(), seed, opts).sql();
    sql::Query q = sql::resolve_names(sql::parse_sql(text), movies());
    qg::QueryGraph g = qg::build(q, movies());
    ASSERT_EQ(qg::total_nodes(g), from_items(q)) << text;
    ASSERT_EQ(qg::placed_predicates(g), sql::count_atoms(q)) << text;
    check_fk_flags(g, movies());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      for (std::size_t k = i + 1; k < g.nodes.size(); ++k) ASSERT_NE(g.nodes[i].alias, g.nodes[k].alias);
    }
  }
  for (const auto& name : kCorpus) check_fk_flags(graph(name), schema_for(name));
}

}  // namespace
}  // namespace talkback
