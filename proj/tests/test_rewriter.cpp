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

#include <algorithm>

#include "query_gen.hpp"
#include "talkback/classifier.hpp"
#include "talkback/error.hpp"
#include "talkback/evaluator.hpp"
#include "talkback/rewriter.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::corpus;
using testing::movies;

std::vector<Motif> motifs(const std::string& name) {
  const SchemaGraph& g = name == "emp" ? testing::emp() : movies();
  return detect_motifs(qg::build(corpus(name), g), &g);
}

sql::Query resolve(const std::string& text, const SchemaGraph& g = movies()) {
  return sql::resolve_names(sql::parse_sql(text), g);
}

TEST(DetectMotifs, Q6IsDivision) {
  auto ms = motifs("q6");
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].kind, Motif::Kind::Division);
  EXPECT_EQ(ms[0].params.at("range"), "MOVIE");
  EXPECT_EQ(ms[0].params.at("range_alias"), "m");
  EXPECT_EQ(ms[0].params.at("divisor"), "GENRE");
  EXPECT_FALSE(is_higher_order(ms[0]));
}

TEST(DetectMotifs, Q8IsSameValueOnYear) {
  auto ms = motifs("q8");
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].kind, Motif::Kind::SameValue);
  EXPECT_EQ(ms[0].params.at("alias"), "m");
  EXPECT_EQ(ms[0].params.at("relation"), "MOVIE");
  EXPECT_EQ(ms[0].params.at("attribute"), "year");
  EXPECT_TRUE(is_higher_order(ms[0]));
}

TEST(DetectMotifs, Q9IsSuperlativeAllEarliest) {
  auto ms = motifs("q9");
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].kind, Motif::Kind::SuperlativeAll);
  EXPECT_EQ(ms[0].params.at("attribute"), "year");
  EXPECT_EQ(ms[0].params.at("direction"), "min");
  EXPECT_EQ(ms[0].params.at("superlative"), "earliest");
  EXPECT_TRUE(is_higher_order(ms[0]));
}

TEST(DetectMotifs, NoneOnPlainQueries) {
  for (const char* name : {"q1", "q2", "q3", "q4", "q5", "q7", "emp"}) EXPECT_TRUE(motifs(name).empty()) << name;
}

TEST(DetectMotifs, CountDistinctAboveOneIsNotSameValue) {
  auto g = qg::build(resolve("select a.name from MOVIE m, CAST c, ACTOR a where m.id = c.mid and c.aid = a.id "
                             "group by a.name having count(distinct m.year) = 2"),
                     movies());
  EXPECT_TRUE(detect_motifs(g, &movies()).empty());
}

TEST(Flatten, Q5BecomesQ1) {
  sql::Query flat = flatten(corpus("q5"));
  EXPECT_EQ(sql::to_sql(flat), sql::to_sql(corpus("q1")));
  EXPECT_EQ(classify(qg::build(flat, movies()), &movies()).label, QueryClassLabel::Path);
}

TEST(Flatten, IdentityOnFlatQueries) {
  for (const char* name : {"q1", "q2", "q3", "q4"}) EXPECT_EQ(flatten(corpus(name)), corpus(name)) << name;
}

TEST(Flatten, ClashingAliasesGetFreshNames) {
  sql::Query q = resolve("select m.title from MOVIE m where m.id in (select m.mid from CAST m where m.role = 'x')");
  sql::Query flat = flatten(q);
  ASSERT_EQ(flat.from.size(), 2u);
  EXPECT_EQ(flat.from[1].alias, "m_2");
  EXPECT_EQ(sql::to_sql(flat), "select m.title from MOVIE m, CAST m_2 where m.id = m_2.mid and m_2.role = 'x'");
}

TEST(Flatten, RefusesNonInNesting) {
  for (const char* name : {"q6", "q7", "q9"}) {
    EXPECT_FALSE(flatten_obstacle(corpus(name)).empty()) << name;
    try {
      flatten(corpus(name));
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotFlattenable);
    }
  }
  EXPECT_FALSE(
      flatten_obstacle(resolve("select m.title from MOVIE m where m.id in (select c.mid from CAST c where c.role = m.title)"))
          .empty());
  EXPECT_TRUE(flatten_obstacle(corpus("q5")).empty());
}

TEST(FlattenProperty, Idempotent) {
  testing::GenOptions opts;
  opts.in_subquery = 0.6;
  std::size_t nested = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    sql::Query q = resolve(testing::QueryGen(movies(), seed, opts).sql());
    if (!flatten_obstacle(q).empty()) continue;
    nested += q.from.size() != flatten(q).from.size();
    sql::Query once = flatten(q);
    EXPECT_EQ(flatten(once), once) << sql::to_sql(q);
    EXPECT_TRUE(flatten_obstacle(once).empty());
  }
  EXPECT_GT(nested, 50u);
}

void expect_equivalent(const sql::Query& a, const sql::Query& b, const SchemaGraph& g, std::uint64_t seeds,
                       std::size_t max_rows) {
  std::vector<Cell> constants = query_constants(a);
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    Database db = random_database(g, seed, max_rows, constants);
    ResultSet ra = evaluate(a, db), rb = evaluate(b, db);
    ASSERT_TRUE(same_multiset(ra, rb)) << "seed " << seed << "\n" << to_string(ra) << "\nvs\n" << to_string(rb);
  }
}

TEST(FlattenProperty, Q5EquivalentOverRandomDatabases) {
  expect_equivalent(corpus("q5"), flatten(corpus("q5")), movies(), 100, 5);
  expect_equivalent(corpus("q5"), corpus("q1"), movies(), 100, 5);
}

TEST(FlattenProperty, TwoLevelChainOnEmp) {
  sql::Query q = resolve(
      "select e.name from EMP e where e.did in (select d.did from DEPT d where d.mgr in "
      "(select m.eid from EMP m where m.sal > 1))",
      testing::emp());
  sql::Query flat = flatten(q);
  EXPECT_EQ(flat.from.size(), 3u);
  expect_equivalent(q, flat, testing::emp(), 100, 5);
}

ResultSet distinct(ResultSet r) {
  std::sort(r.rows.begin(), r.rows.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](const Cell& x, const Cell& y) { return compare_cells(x, y) < 0; });
  });
  r.rows.erase(std::unique(r.rows.begin(), r.rows.end()), r.rows.end());
  return r;
}

// IN is a semi-join: once unnested, an outer row repeats for every matching
// inner row. Q5 and the EMP chain match on keys so multisets agree there; in
// general only the sets of rows do, and the unkeyed case below shows both.
TEST(FlattenProperty, UnkeyedInDuplicatesRows) {
  sql::Query q = resolve("select m.title from MOVIE m where m.id in (select c.mid from CAST c)");
  Database db = random_database(movies(), 3, 5);
  db.tables["MOVIE"] = {Tuple{"MOVIE", {{"id", Cell{std::int64_t{1}}}, {"title", Cell{std::string("A")}},
                                        {"year", Cell{std::int64_t{2000}}}}, 0}};
  db.tables["CAST"] = {
      Tuple{"CAST", {{"mid", Cell{std::int64_t{1}}}, {"aid", Cell{std::int64_t{1}}}, {"role", Cell{std::string("x")}}}, 0},
      Tuple{"CAST", {{"mid", Cell{std::int64_t{1}}}, {"aid", Cell{std::int64_t{2}}}, {"role", Cell{std::string("y")}}}, 1}};
  EXPECT_EQ(evaluate(q, db).rows.size(), 1u);
  EXPECT_EQ(evaluate(flatten(q), db).rows.size(), 2u);
  EXPECT_EQ(distinct(evaluate(q, db)), distinct(evaluate(flatten(q), db)));
}

// Generated IN-nesting chains keep their set of answers once flattened.
TEST(FlattenProperty, GeneratedInQueriesEquivalentAsSets) {
  testing::GenOptions opts;
  opts.in_subquery = 1.0;
  opts.max_relations = 2;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    sql::Query q = resolve(testing::QueryGen(movies(), seed, opts).sql());
    if (!flatten_obstacle(q).empty()) continue;
    ++checked;
    sql::Query flat = flatten(q);
    for (std::uint64_t s = 0; s < 8; ++s) {
      Database db = random_database(movies(), s, 3, query_constants(q));
      ASSERT_EQ(distinct(evaluate(q, db)), distinct(evaluate(flat, db))) << sql::to_sql(q) << " s " << s;
    }
  }
  EXPECT_GT(checked, 60u);
}

}  // namespace
}  // namespace talkback
