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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace talkback {

enum class ErrorKind {
  // schema_model
  MalformedDocument,
  DanglingReference,
  MissingHeading,
  BadTemplate,
  // data_store
  HeaderMismatch,
  UnknownRelation,
  RaggedRow,
  WrongRelation,
  UnknownAttribute,
  // template_engine
  UnbalancedBraces,
  UnknownGuard,
  EmptyLoopBody,
  MalformedTemplate,
  UnknownDefinition,
  UnboundAlias,
  MissingAttribute,
  // narrator
  UnknownStart,
  // sql_frontend
  SyntaxError,
  Unsupported,
  UnknownColumn,
  AmbiguousColumn,
  // rewriter
  NotFlattenable,
  // evaluator
  EvaluationError,
  // filesystem
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the toolkit. `kind` identifies the failure class;
/// `position` is a byte offset into the offending input when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> position = std::nullopt,
        std::vector<std::string> expected = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::size_t>& position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> position_;
  std::vector<std::string> expected_;
};

}  // namespace talkback
