// Copyright 2026 The vandal-sentinel Authors.
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

#ifndef VSENTINEL_ERROR_H_
#define VSENTINEL_ERROR_H_

#include <stdexcept>
#include <string>

namespace vsentinel {

enum class ErrorCode {
  kMalformedJson,
  kSchemaViolation,
  kItemMismatch,
  kSchemaMismatch,
  kNotFound,
  kTransport,
  kMalformed,
  kCheckpointInvalid,
  kAlreadySplit,
  kSingleClass,
  kEmptyInput,
  kOneClass,
  kInvalidArgument,
  kBatchTooLarge,
  kModelUnavailable,
  kRevisionNotFound,
  kUpstreamUnavailable,
  kInvalidSpec,
  kMissingReport,
  kMissingCurves,
  kServiceUnreachable,
  kUnknownRevision,
  kConflictingConcurrentLabel,
  kConfig,
  kIo,
};

// Stable names; these appear verbatim in HTTP error bodies and CLI output.
const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {});

  ErrorCode code() const { return code_; }
  // Location of the offending node for parse errors (e.g. "claims.P1").
  const std::string& path() const { return path_; }
  // The message without the code name and path prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string path_;
  std::string message_;
};

}  // namespace vsentinel

#endif  // VSENTINEL_ERROR_H_
