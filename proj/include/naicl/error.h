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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace naicl {

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kIo,
  kFormat,
  kEmpty,
  kDuplicateId,
  kDegenerateSignal,
  kDimensionMismatch,
  kNonFinite,
  kMissingEmbedding,
  kKindMismatch,
  kLeakage,
  kTransport,
  kTimeout,
  kAuth,
  kClientError,
  kMalformedResponse,
  kRetriesExhausted,
  kNoJson,
  kSchema,
  kUnknownLabel,
  kSpanNotFound,
  kForbiddenTerm,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as naicl::Error; the code lets callers
// branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace naicl
