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

#include "talkback/error.hpp"

namespace talkback {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::MissingHeading: return "MissingHeading";
    case ErrorKind::BadTemplate: return "BadTemplate";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    case ErrorKind::UnknownRelation: return "UnknownRelation";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::WrongRelation: return "WrongRelation";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::UnbalancedBraces: return "UnbalancedBraces";
    case ErrorKind::UnknownGuard: return "UnknownGuard";
    case ErrorKind::EmptyLoopBody: return "EmptyLoopBody";
    case ErrorKind::MalformedTemplate: return "MalformedTemplate";
    case ErrorKind::UnknownDefinition: return "UnknownDefinition";
    case ErrorKind::UnboundAlias: return "UnboundAlias";
    case ErrorKind::MissingAttribute: return "MissingAttribute";
    case ErrorKind::UnknownStart: return "UnknownStart";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::AmbiguousColumn: return "AmbiguousColumn";
    case ErrorKind::NotFlattenable: return "NotFlattenable";
    case ErrorKind::EvaluationError: return "EvaluationError";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           const std::optional<std::size_t>& position) {
  std::string out(to_string(kind));
  if (position) out += " at offset " + std::to_string(*position);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> position,
             std::vector<std::string> expected)
    : std::runtime_error(format_message(kind, message, position)),
      kind_(kind),
      position_(position),
      expected_(std::move(expected)) {}

}  // namespace talkback
