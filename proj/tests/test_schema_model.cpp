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

#include "talkback/error.hpp"
#include "talkback/schema_model.hpp"
#include "test_support.hpp"

namespace talkback {
namespace {

using testing::fixture;
using testing::movies;

ErrorKind load_error(const std::string& doc) {
  try {
    load_schema_text(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "document loaded";
  return ErrorKind::Io;
}

std::size_t count_kind(const std::vector<Diagnostic>& ds, DiagnosticKind kind) {
  return static_cast<std::size_t>(
      std::count_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.kind == kind; }));
}

std::size_t count_substr(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

const char* kTwoRelations = R"({
  "relations": [
    {"name": "A", "noun": {"singular": "a", "plural": "as"}, "heading": "x",
     "attributes": [{"name": "x"}, {"name": "id"}]},
    {"name": "B", "noun": {"singular": "b", "plural": "bs"}, "heading": "y",
     "attributes": [{"name": "y"}, {"name": "aid"}]}
  ],
  "joins": [%JOINS%]
})";

std::string two_relations(const std::string& joins) {
  std::string doc = kTwoRelations;
  doc.replace(doc.find("%JOINS%"), 7, joins);
  return doc;
}

TEST(LoadSchema, MovieFixtureHasSixRelations) {
  const SchemaGraph& g = movies();
  EXPECT_EQ(g.relations.size(), 6u);
  for (const char* name : {"MOVIE", "GENRE", "DIRECTOR", "DIRECTED", "CAST", "ACTOR"}) {
    EXPECT_NE(g.find_relation(name), nullptr) << name;
  }
  EXPECT_NE(g.find_relation("movies"), nullptr);  // declared alias, case-insensitive
  EXPECT_EQ(g.find_relation("MOVI"), nullptr);
}

TEST(LoadSchema, EmptyDocumentGivesEmptyGraphWithWarning) {
  SchemaGraph g = load_schema_text(R"({"relations": [], "joins": []})");
  EXPECT_TRUE(g.relations.empty());
  EXPECT_TRUE(g.joins.empty());
  ASSERT_FALSE(g.diagnostics.empty());
  EXPECT_EQ(g.diagnostics.front().severity, Severity::Warning);
  EXPECT_EQ(g.diagnostics.front().kind, DiagnosticKind::EmptySchema);
}

TEST(LoadSchema, TypoInJoinIsDanglingReference) {
  std::string doc = testing::read_text(fixture("movies.schema.json"));
  auto pos = doc.find("\"to\": \"ACTOR\"");
  ASSERT_NE(pos, std::string::npos);
  doc.replace(pos, 13, "\"to\": \"ACTRO\"");
  EXPECT_EQ(load_error(doc), ErrorKind::DanglingReference);
}

TEST(LoadSchema, Errors) {
  EXPECT_EQ(load_error("{\"relations\": ["), ErrorKind::MalformedDocument);
  EXPECT_EQ(load_error("[1, 2]"), ErrorKind::MalformedDocument);
  EXPECT_EQ(load_error(R"({"relations": [{"name": "A", "noun": {"singular": "a", "plural": "as"},
                                          "attributes": [{"name": "x"}]}], "joins": []})"),
            ErrorKind::MissingHeading);
  EXPECT_EQ(load_error(R"({"relations": [{"name": "A", "noun": {"singular": "a", "plural": "as"}, "heading": "x",
                                          "attributes": [{"name": "x", "template": "{A.x"}]}], "joins": []})"),
            ErrorKind::BadTemplate);
  EXPECT_EQ(load_error(two_relations(R"({"from": "B", "to": "A", "from_key": "aid", "to_key": "nope"})")),
            ErrorKind::DanglingReference);
}

TEST(LoadSchema, WeightsDefaultToOne) {
  SchemaGraph g = load_schema_text(two_relations(R"({"from": "B", "to": "A", "from_key": "aid", "to_key": "id"})"));
  EXPECT_EQ(g.find_relation("A")->weight, 1.0);
  EXPECT_EQ(g.find_attribute("A", "x")->weight, 1.0);
}

TEST(Validate, MovieFixtureIsClean) { EXPECT_EQ(validate(movies()), std::vector<Diagnostic>{}); }

TEST(Validate, TwoHeadingAttributesGiveOneMissingHeading) {
  SchemaGraph g = movies();
  for (auto& a : g.attributes) {
    if (a.relation == "MOVIE" && a.name == "year") a.is_heading = true;
  }
  auto ds = validate(g);
  EXPECT_EQ(ds.size(), 1u);
  EXPECT_EQ(count_kind(ds, DiagnosticKind::MissingHeading), 1u);
}

TEST(Validate, DisconnectedRelationGivesOneWarning) {
  SchemaGraph g = load_schema_text(two_relations(""));
  auto ds = validate(g);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].kind, DiagnosticKind::Disconnected);
  EXPECT_EQ(ds[0].severity, Severity::Warning);
  // The loader attaches the same warning rather than refusing the document.
  EXPECT_EQ(count_kind(g.diagnostics, DiagnosticKind::Disconnected), 1u);
}

// Break one invariant at a time; validate must flag exactly that.
TEST(ValidateProperty, SingleFieldMutationsAreFlagged) {
  struct Mutation {
    const char* name;
    std::function<void(SchemaGraph&)> apply;
    DiagnosticKind expected;
  };
  std::vector<Mutation> mutations = {
      {"negative relation weight", [](SchemaGraph& g) { g.relations[0].weight = -1; }, DiagnosticKind::NegativeWeight},
      {"negative attribute weight", [](SchemaGraph& g) { g.attributes[1].weight = -0.5; },
       DiagnosticKind::NegativeWeight},
      {"duplicate relation name", [](SchemaGraph& g) { g.relations[1].name = g.relations[0].name; },
       DiagnosticKind::DuplicateName},
      {"join to unknown relation", [](SchemaGraph& g) { g.joins[0].to_relation = "NOWHERE"; },
       DiagnosticKind::DanglingReference},
      {"join on unknown key", [](SchemaGraph& g) { g.joins[0].from_key = "nokey"; }, DiagnosticKind::DanglingReference},
      {"heading names no attribute", [](SchemaGraph& g) { g.relations[0].heading_attribute = "ghost"; },
       DiagnosticKind::MissingHeading},
      {"no heading flag", [](SchemaGraph& g) {
         for (auto& a : g.attributes) {
           if (a.relation == g.relations[0].name) a.is_heading = false;
         }
       }, DiagnosticKind::MissingHeading},
      {"unparsable projection template", [](SchemaGraph& g) {
         for (auto& p : g.projections) {
           if (!p.template_text.empty()) {
             p.template_text = "{broken";
             break;
           }
         }
       }, DiagnosticKind::BadTemplate},
      {"projection for a missing attribute", [](SchemaGraph& g) { g.projections.pop_back(); },
       DiagnosticKind::MissingProjection},
      {"join path with a gap", [](SchemaGraph& g) { g.join_paths[0].path = {"DIRECTOR", "GENRE", "ACTOR"}; },
       DiagnosticKind::BadJoinPath},
  };
  for (const auto& m : mutations) {
    SchemaGraph g = movies();
    m.apply(g);
    auto ds = validate(g);
    EXPECT_GE(count_kind(ds, m.expected), 1u) << m.name;
    for (const auto& d : ds) EXPECT_FALSE(d.subject.empty()) << m.name;
  }
}

TEST(EmitDot, MovieFixtureHasSixNodesFiveEdges) {
  std::string dot = emit_dot(movies());
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_EQ(count_substr(dot, "->"), 5u);
  EXPECT_EQ(count_substr(dot, "[label=\"") - count_substr(dot, "->"), 6u);
}

TEST(EmitDot, EmptyGraphHasOnlyHeaderAndFooter) {
  std::string dot = emit_dot(SchemaGraph{});
  EXPECT_EQ(count_substr(dot, "->"), 0u);
  EXPECT_EQ(count_substr(dot, "[label="), 0u);
  EXPECT_NE(dot.find('}'), std::string::npos);
}

TEST(EmitDot, Deterministic) { EXPECT_EQ(emit_dot(movies()), emit_dot(load_schema_file(fixture("movies.schema.json")))); }

TEST(EmitDot, DistinguishesFixtures) {
  EXPECT_NE(emit_dot(movies()), emit_dot(load_schema_file(fixture("split.schema.json"))));
  EXPECT_NE(emit_dot(movies()), emit_dot(load_schema_file(fixture("emp.schema.json"))));
}

TEST(RoundTrip, SerializeThenLoadIsIdentity) {
  for (const char* name : {"movies.schema.json", "split.schema.json", "emp.schema.json"}) {
    SchemaGraph g = load_schema_file(fixture(name));
    SchemaGraph back = load_schema_text(serialize_schema(g));
    EXPECT_EQ(back, g) << name;
    EXPECT_EQ(serialize_schema(back), serialize_schema(g)) << name;
  }
}

TEST(Lookup, JoinsAndPaths) {
  const SchemaGraph& g = movies();
  EXPECT_NE(g.find_join("CAST", "aid", "ACTOR", "id"), nullptr);
  EXPECT_NE(g.find_join("ACTOR", "id", "CAST", "aid"), nullptr);
  EXPECT_EQ(g.find_join("ACTOR", "name", "CAST", "aid"), nullptr);
  EXPECT_NE(g.find_join_path({"DIRECTOR", "DIRECTED", "MOVIE"}), nullptr);
  EXPECT_NE(g.find_join_path({"MOVIE", "DIRECTED", "DIRECTOR"}), nullptr);
  EXPECT_TRUE(g.is_join_key("CAST", "mid"));
  EXPECT_FALSE(g.is_join_key("MOVIE", "title"));
}

}  // namespace
}  // namespace talkback
