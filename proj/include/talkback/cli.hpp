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
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace talkback::cli {

enum class Mode { Declarative, Procedural, Auto };
enum class Output { Text, Json, Dot };

struct CliConfig {
  std::string command;
  std::string schema_path;
  std::optional<std::string> data_dir;
  Mode mode = Mode::Auto;
  std::size_t max_tuples = 3;
  std::optional<std::string> start;
  Output output = Output::Text;
  std::optional<std::string> sql;
  std::optional<std::string> rank;
  std::optional<std::string> relations;  // comma-separated
  std::optional<std::string> motifs;     // motif pattern file
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;

/// Runs one command. `args` excludes the program name. `stdin_sql` is the
/// piped standard input, or null when there is none; when both it and a SQL
/// argument are present, stdin wins and a warning goes to `err`.
int run(const std::vector<std::string>& args, std::istream* stdin_sql, std::ostream& out, std::ostream& err);

}  // namespace talkback::cli
