// Copyright 2026 The irfs Authors
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

#include <stdexcept>
#include <string>

namespace irfs {

enum class ErrorCode {
  FileNotFound,
  MalformedJson,
  SchemaViolation,
  DanglingReference,
  DuplicateId,
  EmptyDataset,
  ProvenanceMismatch,
  InfeasibleSpec,
  IndexOutOfRange,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "file-not-found";
    case ErrorCode::MalformedJson: return "malformed-json";
    case ErrorCode::SchemaViolation: return "schema-violation";
    case ErrorCode::DanglingReference: return "dangling-reference";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::EmptyDataset: return "empty-dataset";
    case ErrorCode::ProvenanceMismatch: return "provenance-mismatch";
    case ErrorCode::InfeasibleSpec: return "infeasible-spec";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
  }
  return "unknown";
}

// All library failures surface as irfs::Error. The code distinguishes input
// problems from contract violations; the message carries the offending ids,
// paths or byte positions.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace irfs
