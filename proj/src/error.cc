// Copyright (c) 2026 The NAICL Authors. All Rights Reserved.
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

#include "naicl/error.h"

namespace naicl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kEmpty: return "empty input";
    case ErrorCode::kDuplicateId: return "duplicate id";
    case ErrorCode::kDegenerateSignal: return "degenerate signal";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kMissingEmbedding: return "missing embedding";
    case ErrorCode::kKindMismatch: return "embedder kind mismatch";
    case ErrorCode::kLeakage: return "exemplar leakage";
    case ErrorCode::kTransport: return "transport failure";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kAuth: return "authentication error";
    case ErrorCode::kClientError: return "client error";
    case ErrorCode::kMalformedResponse: return "malformed response";
    case ErrorCode::kRetriesExhausted: return "retries exhausted";
    case ErrorCode::kNoJson: return "no json object";
    case ErrorCode::kSchema: return "schema violation";
    case ErrorCode::kUnknownLabel: return "unknown label";
    case ErrorCode::kSpanNotFound: return "span not found";
    case ErrorCode::kForbiddenTerm: return "forbidden term";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace naicl
