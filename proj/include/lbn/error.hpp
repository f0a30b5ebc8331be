// Copyright 2026 The LBN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lbn {

enum class ErrorKind {
  SyntaxError,
  UnknownPredicate,
  UnknownEntity,
  UnknownType,
  UnknownQuantifier,
  RoleMismatch,
  TypeMismatch,
  UnboundVariable,
  DuplicateDeclaration,
  EmbeddingTooDeep,
  UngroundedProposition,
  QueryUndeclared,
  InconsistentEvidence,
  TooLarge,
  EmptyPremises,
  EmptySupporters,
  EmptySentence,
  UnknownWord,
  InvalidConfig,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownPredicate: return "UnknownPredicate";
    case ErrorKind::UnknownEntity: return "UnknownEntity";
    case ErrorKind::UnknownType: return "UnknownType";
    case ErrorKind::UnknownQuantifier: return "UnknownQuantifier";
    case ErrorKind::RoleMismatch: return "RoleMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::EmbeddingTooDeep: return "EmbeddingTooDeep";
    case ErrorKind::UngroundedProposition: return "UngroundedProposition";
    case ErrorKind::QueryUndeclared: return "QueryUndeclared";
    case ErrorKind::InconsistentEvidence: return "InconsistentEvidence";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyPremises: return "EmptyPremises";
    case ErrorKind::EmptySupporters: return "EmptySupporters";
    case ErrorKind::EmptySentence: return "EmptySentence";
    case ErrorKind::UnknownWord: return "UnknownWord";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

// Every failure in the library is reported as an lbn::Error. Source
// positions are 1-based; 0 means "not applicable".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(format(kind, message, line, column)),
        kind_(kind),
        line_(line),
        column_(column) {}

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message, int line, int column) {
    std::string out(to_string(kind));
    if (line > 0) {
      out += " at " + std::to_string(line) + ":" + std::to_string(column);
    }
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace lbn
