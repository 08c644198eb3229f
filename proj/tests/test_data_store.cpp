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
#include <random>
#include <sstream>

#include "talkback/data_store.hpp"
#include "talkback/error.hpp"
#include "talkback/evaluator.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::movies;
using testing::movies_db;

const JoinEdge& edge(const std::string& from, const std::string& to) {
  for (const auto& j : movies().joins) {
    if (text::iequals(j.from_relation, from) && text::iequals(j.to_relation, to)) return j;
  }
  throw std::logic_error("no such edge");
}

std::vector<std::string> titles(const std::vector<const Tuple*>& ts) {
  std::vector<std::string> out;
  for (const Tuple* t : ts) out.push_back(cell_to_string(t->at("title")));
  return out;
}

ErrorKind load_error(const std::map<std::string, std::string>& tables) {
  std::vector<std::istringstream> streams;
  streams.reserve(tables.size());
  std::map<std::string, std::istream*, text::ILess> in;
  for (const auto& [name, body] : tables) {
    streams.emplace_back(body);
    in[name] = &streams.back();
  }
  try {
    load_data(movies(), in);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "data loaded";
  return ErrorKind::Io;
}

TEST(LoadData, MovieFixture) {
  const Database& db = movies_db();
  EXPECT_GE(db.table("MOVIE").size(), 3u);
  EXPECT_EQ(cell_to_string(db.table("DIRECTOR")[0].at("name")), "Woody Allen");
  EXPECT_EQ(cell_to_string(db.table("DIRECTOR")[0].at("bdate")), "December 1, 1935");
  EXPECT_TRUE(std::holds_alternative<std::int64_t>(db.table("MOVIE")[0].at("year")));
  EXPECT_TRUE(std::holds_alternative<std::string>(db.table("MOVIE")[0].at("title")));
}

TEST(LoadData, WoodyAllenHasThreeMovies) {
  const Database& db = movies_db();
  const Tuple& woody = db.table("DIRECTOR")[0];
  std::vector<std::string> out;
  for (const Tuple* d : follow_join(db, movies(), edge("DIRECTED", "DIRECTOR"), woody)) {
    for (const Tuple* m : follow_join(db, movies(), edge("DIRECTED", "MOVIE"), *d)) {
      out.push_back(cell_to_string(m->at("title")));
    }
  }
  EXPECT_EQ(out, (std::vector<std::string>{"Match Point", "Melinda and Melinda", "Anything Else"}));
}

TEST(LoadData, EmptyCsvWithHeaderGivesEmptyTable) {
  std::istringstream genre("mid,genre\n");
  Database db = load_data(movies(), {{"GENRE", &genre}});
  EXPECT_TRUE(db.table("GENRE").empty());
  EXPECT_TRUE(db.table("MOVIE").empty());  // no stream: empty table
}

TEST(LoadData, EmptyCellIsNullAndTypingIsPerColumn) {
  std::istringstream m("id,title,year\n1,A,\n2,B,1999\n");
  Database db = load_data(movies(), {{"MOVIE", &m}});
  EXPECT_TRUE(is_null(db.table("MOVIE")[0].at("year")));
  EXPECT_EQ(std::get<std::int64_t>(db.table("MOVIE")[1].at("year")), 1999);
}

TEST(LoadData, Errors) {
  EXPECT_EQ(load_error({{"MOVIE", "id,title,year\n1,A\n"}}), ErrorKind::RaggedRow);
  EXPECT_EQ(load_error({{"MOVIE", "id,name,year\n1,A,2000\n"}}), ErrorKind::HeaderMismatch);
  EXPECT_EQ(load_error({{"STUDIO", "id\n1\n"}}), ErrorKind::UnknownRelation);
  EXPECT_EQ(load_error({{"MOVIE", "id,title,year\n1,\"open,2000\n"}}), ErrorKind::MalformedDocument);
}

TEST(LoadData, RaggedRowNamesLine) {
  std::istringstream m("id,title,year\n1,A,2000\n2,B\n");
  try {
    load_data(movies(), {{"MOVIE", &m}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadData, Deterministic) {
  EXPECT_EQ(load_data_dir(movies(), testing::fixture("movies")), movies_db());
}

TEST(ParseCsv, QuotingFollowsRfc4180) {
  auto rows = parse_csv("a,\"b,c\",\"d \"\"q\"\"\"\r\n1,2,3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "d \"q\""}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2", "3"}));
}

TEST(FollowJoin, NullAndMissingKeysJoinNothing) {
  const Database& db = movies_db();
  Tuple cast{"CAST", {{"mid", Cell{}}, {"aid", Cell{std::int64_t{1}}}, {"role", Cell{std::string("x")}}}, 99};
  EXPECT_TRUE(follow_join(db, movies(), edge("CAST", "MOVIE"), cast).empty());
  cast.values[0].second = Cell{std::int64_t{12345}};
  EXPECT_TRUE(follow_join(db, movies(), edge("CAST", "MOVIE"), cast).empty());
}

TEST(FollowJoin, WrongRelation) {
  const Tuple& actor = movies_db().table("ACTOR")[0];
  EXPECT_THROW(follow_join(movies_db(), movies(), edge("GENRE", "MOVIE"), actor), Error);
}

TEST(FollowJoinProperty, ResultsSatisfyKeyEquality) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Database db = random_database(movies(), seed, 5);
    for (const auto& j : movies().joins) {
      for (const auto& t : db.table(j.from_relation)) {
        for (const Tuple* o : follow_join(db, movies(), j, t)) {
          EXPECT_EQ(o->relation, db.table(j.to_relation).empty() ? "" : db.table(j.to_relation)[0].relation);
          EXPECT_EQ(o->at(j.to_key), t.at(j.from_key));
          EXPECT_FALSE(is_null(o->at(j.to_key)));
        }
      }
      for (const auto& t : db.table(j.to_relation)) {
        for (const Tuple* o : follow_join(db, movies(), j, t)) EXPECT_EQ(o->at(j.from_key), t.at(j.to_key));
      }
    }
  }
}

TEST(SelectTuples, YearDescendingBudgetTwo) {
  auto out = select_tuples(movies_db(), movies(), "MOVIE", 2, RankSpec::parse("year:desc"));
  EXPECT_EQ(titles(out), (std::vector<std::string>{"Match Point", "Melinda and Melinda"}));
}

TEST(SelectTuples, LargeBudgetReturnsWholeTable) {
  auto out = select_tuples(movies_db(), movies(), "MOVIE", 100, RankSpec::load_order());
  EXPECT_EQ(out.size(), movies_db().table("MOVIE").size());
}

TEST(SelectTuples, BudgetOneAscendingAmongWoodyAllenMovies) {
  Database db = movies_db();
  db.tables["MOVIE"].resize(3);  // the three Woody Allen rows
  auto out = select_tuples(db, movies(), "MOVIE", 1, RankSpec::parse("year:asc"));
  EXPECT_EQ(titles(out), std::vector<std::string>{"Anything Else"});
}

TEST(SelectTuples, UnknownRankAttribute) {
  try {
    select_tuples(movies_db(), movies(), "MOVIE", 1, RankSpec::parse("budget"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownAttribute);
  }
}

// Independent oracle: full sort by (rank key, load position), then a prefix.
TEST(SelectTuplesProperty, PrefixOfFullSort) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Database db = random_database(movies(), seed, 6);
    for (const char* spec : {"year", "year:desc", "title", "load-order"}) {
      RankSpec rank = RankSpec::parse(spec);
      const auto& table = db.table("MOVIE");
      std::vector<std::size_t> idx(table.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      if (!rank.attribute.empty()) {
        auto key = [&](std::size_t i) { return table[i].at(rank.attribute); };
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
          int c = compare_cells(key(a), key(b));
          if (rank.descending) c = -c;
          return c != 0 ? c < 0 : a < b;
        });
      }
      for (std::size_t budget = 1; budget <= 4; ++budget) {
        auto out = select_tuples(db, movies(), "MOVIE", budget, rank);
        ASSERT_EQ(out.size(), std::min(budget, table.size()));
        for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], &table[idx[i]]) << spec << " seed " << seed;
      }
    }
  }
}

TEST(CompareCells, NullsFirstIntegersNumerically) {
  EXPECT_LT(compare_cells(Cell{}, Cell{std::int64_t{0}}), 0);
  EXPECT_LT(compare_cells(Cell{std::int64_t{9}}, Cell{std::int64_t{10}}), 0);
  EXPECT_EQ(compare_cells(Cell{std::string("a")}, Cell{std::string("a")}), 0);
}

}  // namespace
}  // namespace talkback
