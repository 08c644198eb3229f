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

#include <regex>

#include "query_gen.hpp"
#include "talkback/error.hpp"
#include "talkback/query_translator.hpp"
#include "talkback/rewriter.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::corpus;
using testing::movies;

const std::vector<std::string> kCorpus = {"q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9", "emp"};

const SchemaGraph& schema_for(const std::string& name) { return name == "emp" ? testing::emp() : movies(); }

TranslationResult explain_query(const sql::Query& q, const SchemaGraph& g,
                                const std::vector<MotifPattern>& patterns = {}) {
  qg::QueryGraph graph = qg::build(q, g);
  return translate(graph, g, classify(graph, &g), patterns);
}

TranslationResult explain(const std::string& name) { return explain_query(corpus(name), schema_for(name)); }

TranslationResult explain_sql(const std::string& text) {
  return explain_query(sql::resolve_names(sql::parse_sql(text), movies()), movies());
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool any_note_contains(const TranslationResult& r, const std::string& needle) {
  return std::any_of(r.notes.begin(), r.notes.end(), [&](const auto& n) { return n.find(needle) != std::string::npos; });
}

TEST(Translate, Q1) {
  TranslationResult r = explain("q1");
  EXPECT_EQ(text::normalize_whitespace(r.text), "Find the titles of movies where the actor Brad Pitt plays");
  EXPECT_EQ(r.style, TranslationStyle::Declarative);
  EXPECT_EQ(r.class_used.label, QueryClassLabel::Path);
}

TEST(Translate, Q2) {
  EXPECT_EQ(text::normalize_whitespace(explain("q2").text), "Find the actors and titles of action movies directed by G. Loucas");
}

TEST(Translate, Q3LiteralOrdinals) {
  EXPECT_EQ(text::normalize_whitespace(explain("q3").text),
            "Find the name of an actor who has played in a movie, and the name of another actor who has played in the "
            "movie, and the id of the first actor is larger than the id of the second actor");
}

TEST(Translate, Q5MatchesQ1ThroughFlattening) {
  TranslationResult r5 = explain("q5");
  EXPECT_EQ(r5.text, explain("q1").text);
  EXPECT_EQ(r5.class_used.label, QueryClassLabel::NestedFlattenable);
  EXPECT_TRUE(any_note_contains(r5, "flattened to"));
}

TEST(Translate, Q6Division) {
  TranslationResult r = explain("q6");
  EXPECT_EQ(text::normalize_whitespace(r.text), "Find movies that have all genres");
  EXPECT_EQ(r.style, TranslationStyle::Declarative);
}

TEST(Translate, Q8SameValueWithHigherOrderNote) {
  TranslationResult r = explain("q8");
  EXPECT_EQ(r.class_used.label, QueryClassLabel::HigherOrder);
  EXPECT_NE(r.text.find("all in the same year"), std::string::npos) << r.text;
  EXPECT_TRUE(any_note_contains(r, "all in the same year"));
  EXPECT_TRUE(any_note_contains(r, "HigherOrder"));
}

TEST(Translate, Q9CarriesEarliestNoteAndFallsBack) {
  TranslationResult r = explain("q9");
  EXPECT_EQ(r.class_used.label, QueryClassLabel::HigherOrder);
  EXPECT_TRUE(any_note_contains(r, "earliest"));
  EXPECT_EQ(r.style, TranslationStyle::Procedural);
}

TEST(Translate, EmpQueryLiteralRendering) {
  EXPECT_EQ(text::normalize_whitespace(explain("emp").text),
            "Find the name of an employee who works in a department managed by another employee, and the salary of the "
            "first employee is greater than the salary of the second employee");
}

TEST(Translate, Q7IsProcedural) {
  TranslationResult r = explain("q7");
  EXPECT_EQ(r.style, TranslationStyle::Procedural);
  auto steps = lines(r.text);
  ASSERT_EQ(steps.size(), 5u) << r.text;
  EXPECT_EQ(steps[0], "1. Consider each movie.");
  EXPECT_NE(steps[1].find("cast entries"), std::string::npos);
  EXPECT_NE(steps[2].find("Group the combinations by the id of the movie and the title of the movie"), std::string::npos);
  EXPECT_NE(steps[3].find("Keep groups where 1 is less than the number of genres"), std::string::npos);
  EXPECT_NE(steps[4].find("the number of combinations in the group"), std::string::npos);
}

TEST(TranslateProcedural, StepCounts) {
  auto q1 = lines(translate_procedural(qg::build(corpus("q1"), movies()), movies()).text);
  EXPECT_EQ(q1.size(), 4u);
  EXPECT_EQ(q1.back(), "4. Report the title of the movie.");
  auto single = lines(explain_query(sql::resolve_names(sql::parse_sql("select m.title from MOVIE m"), movies()), movies())
                          .text);
  EXPECT_EQ(single.size(), 1u);
  auto single_proc =
      lines(translate_procedural(qg::build(sql::resolve_names(sql::parse_sql("select m.title from MOVIE m"), movies()), movies()),
                                 movies())
                .text);
  EXPECT_EQ(single_proc, (std::vector<std::string>{"1. Consider each movie.", "2. Report the title of the movie."}));
}

TEST(Lexicalize, Examples) {
  sql::Query q1 = corpus("q1");
  EXPECT_EQ(lexicalize_predicate(q1.where[2], q1, movies()), "the actor Brad Pitt");
  sql::Query emp = corpus("emp");
  EXPECT_EQ(lexicalize_predicate(emp.where[2], emp, testing::emp()),
            "the salary of the first employee is greater than the salary of the second employee");
  sql::Query self = sql::resolve_names(sql::parse_sql("select m.title from MOVIE m where m.year = m.year"), movies());
  EXPECT_EQ(lexicalize_predicate(self.where[0], self, movies()), "the year of the movie is the year of the movie");
}

TEST(Lexicalize, EveryOperatorHasOnePhrase) {
  std::set<std::string> phrases;
  for (auto op : {sql::CompareOp::Eq, sql::CompareOp::Ne, sql::CompareOp::Lt, sql::CompareOp::Le, sql::CompareOp::Gt,
                  sql::CompareOp::Ge}) {
    std::string p = operator_phrase(op);
    EXPECT_FALSE(p.empty());
    phrases.insert(p);
  }
  EXPECT_EQ(phrases.size(), 6u);
}

TEST(TranslatorProperty, CorpusTotality) {
  for (const auto& name : kCorpus) {
    TranslationResult r = explain(name);
    EXPECT_FALSE(r.text.empty()) << name;
    EXPECT_FALSE(testing::has_placeholder_delimiters(r.text)) << name << ": " << r.text;
    EXPECT_EQ(explain(name).text, r.text) << name;
  }
}

TEST(TranslatorProperty, DeclarativePathAndSubgraphHaveOneFind) {
  std::regex numbered("^\\d+\\. ");
  for (const char* name : {"q1", "q2", "q5"}) {
    std::string t = explain(name).text;
    std::size_t finds = 0;
    for (auto pos = t.find("Find"); pos != std::string::npos; pos = t.find("Find", pos + 1)) ++finds;
    EXPECT_EQ(finds, 1u) << name;
    EXPECT_FALSE(std::regex_search(t, numbered)) << name;
  }
}

// Each mention maps to an instance index: "a/an X" and "the first X" are 1,
// "another X" is the next unseen index, "the second X" is 2, and so on.
std::set<std::size_t> ordinal_indices(const std::string& t, const std::string& noun) {
  static const std::vector<std::string> ordinals = {"first", "second", "third", "fourth"};
  std::set<std::size_t> out;
  std::size_t next = 1;
  std::regex mention("\\b(an?|another|the first|the second|the third|the fourth|the) " + noun + "\\b");
  for (auto it = std::sregex_iterator(t.begin(), t.end(), mention); it != std::sregex_iterator(); ++it) {
    std::string q = (*it)[1];
    if (q == "a" || q == "an") {
      out.insert(next = 1);
    } else if (q == "another") {
      out.insert(++next);
    } else if (q != "the") {
      for (std::size_t i = 0; i < ordinals.size(); ++i) {
        if (q == "the " + ordinals[i]) out.insert(i + 1);
      }
    }
  }
  return out;
}

TEST(TranslatorProperty, OrdinalSoundness) {
  struct Case {
    std::string sql;
    std::string noun;
    std::size_t instances;
  };
  std::vector<Case> cases = {
      {testing::corpus_text("q3"), "actor", 2},
      {"select m1.title from MOVIE m1, MOVIE m2 where m1.title = m2.title and m1.id < m2.id", "movie", 2},
      {"select a1.name from ACTOR a1, ACTOR a2, ACTOR a3 where a1.id < a2.id and a2.id < a3.id", "actor", 3},
  };
  for (const auto& c : cases) {
    TranslationResult r = explain_sql(c.sql);
    ASSERT_EQ(r.style, TranslationStyle::Declarative) << c.sql;
    std::set<std::size_t> expected;
    for (std::size_t i = 1; i <= c.instances; ++i) expected.insert(i);
    EXPECT_EQ(ordinal_indices(r.text, c.noun), expected) << r.text;
  }
  EXPECT_EQ(ordinal_indices(explain("emp").text, "employee"), (std::set<std::size_t>{1, 2}));
}

TEST(TranslatorProperty, GeneratedQueriesAlwaysRender) {
  testing::GenOptions opts;
  opts.exists = 0.2;
  opts.in_subquery = 0.2;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::string text = testing::QueryGen(movies(), seed, opts).sql();
    TranslationResult r = explain_sql(text);
    ASSERT_FALSE(r.text.empty()) << text;
    ASSERT_FALSE(testing::has_placeholder_delimiters(r.text)) << text << "\n" << r.text;
    if (r.style == TranslationStyle::Declarative) ASSERT_EQ(r.text.rfind("Find ", 0), 0u) << r.text;
  }
}

TEST(MotifPatterns, LoadAndMatch) {
  auto patterns = load_motif_patterns(R"([
    {"shape": {"class": "GraphMultiInstance", "relations": {"MOVIE": 1, "CAST": 2, "ACTOR": 2},
               "projections": ["ACTOR.name", "ACTOR.name"]},
     "phrase": "Find pairs of actors who played in the same movie"}
  ])");
  ASSERT_EQ(patterns.size(), 1u);
  EXPECT_EQ(patterns[0].relations.at("cast"), 2u);
  TranslationResult r = explain_query(corpus("q3"), movies(), patterns);
  EXPECT_EQ(r.text, "Find pairs of actors who played in the same movie");
  EXPECT_TRUE(any_note_contains(r, "motif pattern"));
  // Wrong projections: no match, literal rendering.
  patterns[0].projections = {"ACTOR.id"};
  EXPECT_NE(explain_query(corpus("q3"), movies(), patterns).text, "Find pairs of actors who played in the same movie");
  EXPECT_EQ(explain_query(corpus("q1"), movies(), load_motif_patterns(testing::read_text(
                                                      testing::source_dir() / "corpus" / "motifs.json")))
                .text,
            explain("q1").text);
}

TEST(MotifPatterns, MalformedFiles) {
  for (const char* doc : {"{}", "[{}]", "[{\"phrase\": 1}]", "[{\"phrase\": \"x\", \"shape\": {\"class\": \"Tree\"}}]",
                          "[{\"phrase\": \"x\", \"shape\": {\"relations\": {\"A\": -1}}}]", "[", ""}) {
    try {
      load_motif_patterns(doc);
      ADD_FAILURE() << doc;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MalformedDocument) << doc;
    }
  }
}

}  // namespace
}  // namespace talkback
