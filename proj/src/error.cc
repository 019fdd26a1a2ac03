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

#include "vsentinel/error.h"

namespace vsentinel {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedJson: return "MalformedJson";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kItemMismatch: return "ItemMismatch";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kCheckpointInvalid: return "CheckpointInvalid";
    case ErrorCode::kAlreadySplit: return "AlreadySplit";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kOneClass: return "OneClass";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kBatchTooLarge: return "BatchTooLarge";
    case ErrorCode::kModelUnavailable: return "ModelUnavailable";
    case ErrorCode::kRevisionNotFound: return "RevisionNotFound";
    case ErrorCode::kUpstreamUnavailable: return "UpstreamUnavailable";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kMissingReport: return "MissingReport";
    case ErrorCode::kMissingCurves: return "MissingCurves";
    case ErrorCode::kServiceUnreachable: return "ServiceUnreachable";
    case ErrorCode::kUnknownRevision: return "UnknownRevision";
    case ErrorCode::kConflictingConcurrentLabel: return "ConflictingConcurrentLabel";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

static std::string FormatMessage(ErrorCode code, const std::string& message,
                                 const std::string& path) {
  std::string out = ErrorCodeName(code);
  if (!path.empty()) out += " at " + path;
  if (!message.empty()) out += ": " + message;
  return out;
}

Error::Error(ErrorCode code, const std::string& message, std::string path)
    : std::runtime_error(FormatMessage(code, message, path)),
      code_(code),
      path_(std::move(path)),
      message_(message) {}

}  // namespace vsentinel
