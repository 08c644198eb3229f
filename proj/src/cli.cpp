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

#include "talkback/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "talkback/classifier.hpp"
#include "talkback/data_store.hpp"
#include "talkback/error.hpp"
#include "talkback/narrator.hpp"
#include "talkback/query_graph.hpp"
#include "talkback/query_translator.hpp"
#include "talkback/schema_model.hpp"
#include "talkback/sql_frontend.hpp"

namespace talkback::cli {

namespace {

constexpr const char* kSynopsis =
    "usage: talkback narrate --schema PATH --data DIR [--mode declarative|procedural|auto]\n"
    "                        [--max-tuples K] [--start RELATION] [--rank ATTR[:asc|:desc]]\n"
    "                        [--relations R1,R2,...] [--output text|json]\n"
    "       talkback explain  [SQL] --schema PATH [--mode ...] [--motifs FILE] [--output text|json]\n"
    "       talkback classify [SQL] --schema PATH [--output text|json]\n"
    "       talkback graph    [SQL] --schema PATH [--output dot|json]\n"
    "SQL may also be given on standard input.\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a command produced, before it is printed in the chosen format.
struct Outcome {
  std::string result;
  std::optional<std::string> cls;
  std::vector<std::string> notes;
  std::vector<std::string> diagnostics;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string require_sql(const CliConfig& config) {
  if (!config.sql || text::trim(*config.sql).empty()) throw UsageError(config.command + " needs a SQL query");
  return *config.sql;
}

sql::Query resolved_query(const CliConfig& config, const SchemaGraph& schema) {
  return sql::resolve_names(sql::parse_sql(require_sql(config)), schema);
}

Outcome narrate_command(const CliConfig& config, const SchemaGraph& schema) {
  if (!config.data_dir) throw UsageError("narrate needs --data");
  Database db = load_data_dir(schema, *config.data_dir);
  NarrationPlan plan;
  plan.tuple_budget = config.max_tuples;
  if (config.start) plan.start_relation = *config.start;
  if (config.rank) plan.rank = RankSpec::parse(*config.rank);
  if (config.relations) {
    std::set<std::string, text::ILess> names;
    std::stringstream ss(*config.relations);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!text::trim(item).empty()) names.insert(text::trim(item));
    }
    plan.relation_filter = std::move(names);
  }
  switch (config.mode) {
    case Mode::Declarative: plan.mode = NarrationMode::Declarative; break;
    case Mode::Procedural: plan.mode = NarrationMode::Procedural; break;
    case Mode::Auto: plan.mode = fallback_mode(schema, plan); break;
  }
  Narrative n = narrate(schema, db, plan);
  Outcome o;
  o.result = n.text();
  o.notes.push_back("mode: " + std::string(to_string(n.mode_used)));
  o.diagnostics = n.diagnostics;
  return o;
}

Outcome explain_command(const CliConfig& config, const SchemaGraph& schema) {
  sql::Query q = resolved_query(config, schema);
  qg::QueryGraph g = qg::build(q, schema);
  QueryClass cls = classify(g, &schema);
  std::vector<MotifPattern> patterns;
  if (config.motifs) patterns = load_motif_patterns(read_file(*config.motifs));
  TranslationResult r;
  if (config.mode == Mode::Procedural) {
    r = translate_procedural(g, schema);
    r.class_used = cls;
  } else {
    r = translate(g, schema, cls, patterns);
  }
  Outcome o;
  o.result = r.text;
  o.cls = std::string(to_string(r.class_used.label));
  o.notes = r.notes;
  o.notes.insert(o.notes.begin(), "style: " + std::string(to_string(r.style)));
  return o;
}

Outcome classify_command(const CliConfig& config, const SchemaGraph& schema) {
  qg::QueryGraph g = qg::build(resolved_query(config, schema), schema);
  QueryClass cls = classify(g, &schema);
  Outcome o;
  o.result = std::string(to_string(cls.label));
  o.cls = o.result;
  o.notes = cls.evidence;
  return o;
}

Outcome graph_command(const CliConfig& config, const SchemaGraph& schema) {
  Outcome o;
  if (!config.sql || text::trim(*config.sql).empty()) {
    o.result = emit_dot(schema);
    return o;
  }
  qg::QueryGraph g = qg::build(resolved_query(config, schema), schema);
  o.result = qg::emit_dot(g);
  o.cls = std::string(to_string(classify(g, &schema).label));
  return o;
}

void print(const CliConfig& config, const Outcome& o, std::ostream& out, std::ostream& err) {
  if (config.output == Output::Json) {
    nlohmann::ordered_json env;
    env["result"] = o.result;
    env["class"] = o.cls ? nlohmann::ordered_json(*o.cls) : nlohmann::ordered_json(nullptr);
    env["notes"] = o.notes;
    env["diagnostics"] = o.diagnostics;
    out << env.dump(2) << "\n";
    return;
  }
  out << o.result;
  if (o.result.empty() || o.result.back() != '\n') out << "\n";
  if (config.command == "classify") {
    for (const auto& e : o.notes) out << "  " << e << "\n";
    return;
  }
  if (config.command == "explain" && o.cls) err << "class: " << *o.cls << "\n";
  if (config.command != "classify") {
    for (const auto& n : o.notes) err << "note: " << n << "\n";
  }
  for (const auto& d : o.diagnostics) err << "diagnostic: " << d << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream* stdin_sql, std::ostream& out, std::ostream& err) {
  CLI::App app{"talkback: schema-driven narration of data and English explanations of SQL"};
  CliConfig config;
  std::string mode = "auto";
  std::string output;
  std::string sql_arg;
  app.add_option("command", config.command, "narrate | explain | classify | graph")
      ->required()
      ->check(CLI::IsMember({"narrate", "explain", "classify", "graph"}));
  app.add_option("sql", sql_arg, "SQL query (or read from standard input)");
  app.add_option("--schema", config.schema_path, "annotated schema graph (JSON)");
  app.add_option("--data", config.data_dir, "directory of <RELATION>.csv files");
  app.add_option("--mode", mode, "declarative | procedural | auto")
      ->check(CLI::IsMember({"declarative", "procedural", "auto"}));
  app.add_option("--max-tuples", config.max_tuples, "tuples per relation in narration")->check(CLI::PositiveNumber);
  app.add_option("--start", config.start, "relation to start narration from");
  app.add_option("--output", output, "text | json | dot")->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_option("--rank", config.rank, "tuple ranking: ATTR, ATTR:asc, ATTR:desc or load-order");
  app.add_option("--relations", config.relations, "comma-separated relations to narrate");
  app.add_option("--motifs", config.motifs, "motif pattern file (JSON)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << "\n" << kSynopsis;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return kExitUsage;
  }

  config.mode = mode == "declarative" ? Mode::Declarative : mode == "procedural" ? Mode::Procedural : Mode::Auto;
  if (output.empty()) output = config.command == "graph" ? "dot" : "text";
  if (output == "dot" && config.command != "graph") {
    err << "error: --output dot only applies to graph\n" << kSynopsis;
    return kExitUsage;
  }
  config.output = output == "json" ? Output::Json : output == "dot" ? Output::Dot : Output::Text;
  if (config.schema_path.empty()) {
    err << "error: --schema is required\n" << kSynopsis;
    return kExitUsage;
  }
  if (!sql_arg.empty()) config.sql = sql_arg;
  if (stdin_sql != nullptr && config.command != "narrate") {
    std::string piped(std::istreambuf_iterator<char>(*stdin_sql), {});
    if (!text::trim(piped).empty()) {
      if (config.sql) err << "warning: SQL given both as an argument and on standard input; using standard input\n";
      config.sql = piped;
    }
  }

  try {
    SchemaGraph schema = load_schema_file(config.schema_path);
    Outcome o;
    if (config.command == "narrate") o = narrate_command(config, schema);
    else if (config.command == "explain") o = explain_command(config, schema);
    else if (config.command == "classify") o = classify_command(config, schema);
    else o = graph_command(config, schema);
    print(config, o, out, err);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << kSynopsis;
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace talkback::cli
