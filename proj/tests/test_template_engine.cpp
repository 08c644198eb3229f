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
#include <map>
#include <random>

#include "talkback/error.hpp"
#include "talkback/template_engine.hpp"
#include "template_gen.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::movies;
using testing::movies_db;

std::vector<const Tuple*> movie_rows(std::initializer_list<std::size_t> rows) {
  std::vector<const Tuple*> out;
  for (std::size_t r : rows) out.push_back(&movies_db().table("MOVIE")[r]);
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

TEST(ParseTemplate, ClauseTemplateHasFourParts) {
  TemplateExpr e = parse_template(R"({DNAME} + " was born" + " in " + {BLOCATION})");
  ASSERT_EQ(e.parts.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<Placeholder>(e.parts[0]));
  EXPECT_EQ(std::get<Literal>(e.parts[1]).text, " was born");
  EXPECT_EQ(std::get<Placeholder>(e.parts[3]).attribute, "BLOCATION");
}

TEST(ParseTemplate, EmptyTextIsEmptyExpression) {
  TemplateExpr e = parse_template("\"\"");
  EXPECT_TRUE(e.empty() || (e.parts.size() == 1 && std::get<Literal>(e.parts[0]).text.empty()));
  EXPECT_EQ(parse_template("").parts.size(), 0u);
  EXPECT_EQ(instantiate(parse_template(""), TupleBindings{}), "");
}

TEST(ParseTemplate, MovieListDefinitionHasTwoGuards) {
  ListLoop loop = parse_definition(
      R"(DEFINE MOVIE_LIST AS [i < arityOf(MOVIE.title)] { {MOVIE.title} + " (" + {MOVIE.year} + "), " })"
      R"( [i = arityOf(MOVIE.title)] "and " + { {MOVIE.title} + " (" + {MOVIE.year} + ")." })");
  EXPECT_EQ(loop.name, "MOVIE_LIST");
  ASSERT_EQ(loop.guards.size(), 2u);
  EXPECT_EQ(loop.guards[0].guard, Guard::LessThanArity);
  EXPECT_EQ(loop.guards[1].guard, Guard::EqualsArity);
  EXPECT_EQ(loop.guards[1].connectors, std::vector<std::string>{"and "});
}

TEST(ParseTemplate, ReserializationReparsesToSameExpression) {
  for (const char* src : {R"({DNAME} + " was born" + " in " + {BLOCATION})", R"("a" + {M:noun} + {M.title:heading})",
                          R"("x" + DEFINE L AS [i < arityOf(M)] { {M.t} + ", " } [i = arityOf(M)] { {M.t} })"}) {
    TemplateExpr e = parse_template(src);
    EXPECT_EQ(parse_template(to_string(e)), e) << src;
  }
}

TEST(ParseTemplate, Errors) {
  EXPECT_EQ(kind_of([] { parse_template(R"("x" + {MOVIE.title)"); }), ErrorKind::UnbalancedBraces);
  EXPECT_EQ(kind_of([] { parse_template(R"({MOVIE.title + "x"})"); }), ErrorKind::MalformedTemplate);
  EXPECT_EQ(kind_of([] { parse_template(R"(DEFINE L AS [i > arityOf(M)] { {M.t} } [i = arityOf(M)] { {M.t} })"); }),
            ErrorKind::UnknownGuard);
  EXPECT_EQ(kind_of([] { parse_template(R"(DEFINE L AS [i < arityOf(M)] { } [i = arityOf(M)] { {M.t} })"); }),
            ErrorKind::EmptyLoopBody);
  EXPECT_EQ(kind_of([] { parse_template("NO_SUCH_LIST"); }), ErrorKind::UnknownDefinition);
}

TEST(Instantiate, MovieListOverThreeMovies) {
  TemplateExpr e = movies().parse("MOVIE_LIST");
  TupleBindings b{{"MOVIE", movie_rows({0, 1, 2})}};
  EXPECT_EQ(instantiate(e, b), "Match Point (2005), Melinda and Melinda (2004), and Anything Else (2003).");
}

TEST(Instantiate, MovieListOverOneMovieUsesOnlyTheLastBody) {
  TemplateExpr e = movies().parse("MOVIE_LIST");
  TupleBindings b{{"MOVIE", movie_rows({0})}};
  EXPECT_EQ(instantiate(e, b), "Match Point (2005).");
}

TEST(Instantiate, LiteralIsVerbatim) {
  EXPECT_EQ(instantiate(parse_template("\"As a director, \""), TupleBindings{}), "As a director, ");
}

TEST(Instantiate, LoopCommaCountIsArityMinusOnePlusBodyCommas) {
  TemplateExpr e = movies().parse("TITLE_LIST");
  for (std::size_t n = 2; n <= 3; ++n) {
    std::vector<const Tuple*> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(&movies_db().table("MOVIE")[i]);
    std::string out = instantiate(e, TupleBindings{{"MOVIE", rows}});
    std::size_t commas_in_titles = 0;
    for (const Tuple* t : rows) {
      std::string title = cell_to_string(t->at("title"));
      commas_in_titles += static_cast<std::size_t>(std::count(title.begin(), title.end(), ','));
    }
    EXPECT_EQ(static_cast<std::size_t>(std::count(out.begin(), out.end(), ',')), n - 1 + commas_in_titles) << out;
  }
}

TEST(Instantiate, Errors) {
  TemplateExpr e = parse_template("{MOVIE.title}");
  EXPECT_EQ(kind_of([&] { instantiate(e, TupleBindings{}); }), ErrorKind::UnboundAlias);
  TemplateExpr missing = parse_template("{MOVIE.budget}");
  EXPECT_EQ(kind_of([&] { instantiate(missing, TupleBindings{{"MOVIE", movie_rows({0})}}); }),
            ErrorKind::MissingAttribute);
}

TEST(InstantiateProperty, FuzzedTemplatesLeaveNoDelimiters) {
  const auto& actors = movies_db().table("ACTOR");
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    testing::TemplateGen gen(seed);
    std::string src = gen.expr(2);
    TemplateExpr e = movies().parse(src);
    std::size_t n_movies = 1 + seed % 3;
    std::size_t n_actors = 1 + (seed / 3) % 3;
    TupleBindings b{{"MOVIE", {}}, {"ACTOR", {}}};
    for (std::size_t i = 0; i < n_movies; ++i) b["MOVIE"].push_back(&movies_db().table("MOVIE")[i]);
    for (std::size_t i = 0; i < n_actors; ++i) b["ACTOR"].push_back(&actors[i]);
    std::string out = instantiate(e, b, &movies());
    ASSERT_FALSE(testing::has_placeholder_delimiters(out)) << src << "\n-> " << out;
  }
}

TEST(ParseTemplateProperty, ArbitraryBytesEitherParseOrRaiseError) {
  std::mt19937_64 rng(7);
  static const std::string alphabet = "{}[]\"+.:<=ia DEFINEASrOf()MOVIE_title\\x";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (int n = static_cast<int>(rng() % 30); n > 0; --n) s += alphabet[rng() % alphabet.size()];
    try {
      TemplateExpr e = parse_template(s);
      EXPECT_EQ(parse_template(to_string(e)), e) << s;
    } catch (const Error&) {
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<Clause> clauses(std::initializer_list<std::pair<const char*, std::size_t>> items) {
  std::vector<Clause> out;
  for (const auto& [t, s] : items) out.push_back(Clause::from_text(t, s));
  return out;
}

TEST(MergeCommon, BirthClausesFuse) {
  auto out = merge_common(clauses({{"DNAME was born in BLOCATION", 1}, {"DNAME was born on BDATE", 1}}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].text(), "DNAME was born in BLOCATION on BDATE");
}

TEST(MergeCommon, SingleClauseUnchanged) {
  auto in = clauses({{"Woody Allen was born in Brooklyn", 2}});
  EXPECT_EQ(merge_common(in), in);
}

TEST(MergeCommon, DistinctSubjectsUnchanged) {
  auto in = clauses({{"The movie M1 is a drama", 3}, {"The movie M2 is a drama", 3}});
  EXPECT_EQ(merge_common(in), in);
}

std::map<std::string, int> bag(const std::vector<Clause>& cs) {
  std::map<std::string, int> out;
  for (const auto& c : cs) {
    for (const auto& t : c.tokens) ++out[t];
  }
  return out;
}

TEST(MergeCommonProperty, PairsConserveTokensAndAreIdempotent) {
  std::mt19937_64 rng(42);
  static const std::vector<std::string> vocab = {"a", "b", "c", "born", "in", "on", "the", "X"};
  int fused_pairs = 0;
  for (int i = 0; i < 2000; ++i) {
    auto word = [&] { return vocab[rng() % vocab.size()]; };
    std::size_t shared = rng() % 4;
    std::vector<std::string> prefix;
    for (std::size_t k = 0; k < shared; ++k) prefix.push_back(word());
    Clause a, b;
    a.tokens = prefix;
    b.tokens = prefix;
    for (std::size_t k = rng() % 4; k > 0; --k) a.tokens.push_back(word());
    for (std::size_t k = rng() % 4; k > 0; --k) b.tokens.push_back(word());
    if (a.tokens.empty() || b.tokens.empty()) continue;
    a.subject_len = 1 + rng() % a.tokens.size();
    b.subject_len = 1 + rng() % b.tokens.size();

    std::size_t common = 0;
    while (common < a.tokens.size() && common < b.tokens.size() && a.tokens[common] == b.tokens[common]) ++common;
    bool fuse = common >= std::max({std::size_t{1}, a.subject_len, b.subject_len});

    std::vector<Clause> in{a, b};
    auto out = merge_common(in);
    EXPECT_EQ(merge_common(out), out);
    if (!fuse) {
      EXPECT_EQ(out, in);
      continue;
    }
    ++fused_pairs;
    ASSERT_EQ(out.size(), 1u);
    std::map<std::string, int> expected = bag(in);
    for (std::size_t k = 0; k < common; ++k) --expected[a.tokens[k]];
    std::erase_if(expected, [](const auto& kv) { return kv.second == 0; });
    EXPECT_EQ(bag(out), expected);
    std::vector<std::string> want(a.tokens.begin(), a.tokens.end());
    want.insert(want.end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(common), b.tokens.end());
    EXPECT_EQ(out[0].tokens, want);
  }
  EXPECT_GT(fused_pairs, 100);
}

TEST(MergeCommonProperty, ListsAreIdempotentAndNeverAddTokens) {
  std::mt19937_64 rng(5);
  static const std::vector<std::string> vocab = {"D", "was", "born", "in", "on", "X"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<Clause> in;
    for (std::size_t n = 1 + rng() % 5; n > 0; --n) {
      Clause c;
      for (std::size_t k = 1 + rng() % 5; k > 0; --k) c.tokens.push_back(vocab[rng() % vocab.size()]);
      c.subject_len = rng() % (c.tokens.size() + 1);
      in.push_back(c);
    }
    auto out = merge_common(in);
    EXPECT_EQ(merge_common(out), out);
    EXPECT_LE(out.size(), in.size());
    auto have = bag(out);
    auto all = bag(in);
    for (const auto& [t, n] : have) EXPECT_LE(n, all[t]);
  }
}

}  // namespace
}  // namespace talkback
