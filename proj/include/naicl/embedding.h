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

#include <span>
#include <string>
#include <vector>

namespace naicl {

inline constexpr std::string_view kBuiltinSpectralKind = "builtin_spectral";
inline constexpr std::string_view kExternalKind = "external";

// Unit-norm acoustic representation. `kind` tags the embedder family so that
// vectors from different encoders are never compared.
struct Embedding {
  std::string kind;
  std::vector<float> values;

  std::size_t dim() const { return values.size(); }
};

// Validates finiteness, L2-normalizes in double precision and stores floats.
// Throws kNonFinite or kDegenerateSignal (zero norm).
Embedding make_unit_embedding(std::string kind, std::span<const double> raw);

double dot(std::span<const float> a, std::span<const float> b);

}  // namespace naicl

#include <nlohmann/json.hpp>

namespace naicl {

struct EmbedderConfig {
  std::string kind = std::string(kBuiltinSpectralKind);
  // builtin_spectral
  int mel_bands = 64;
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  // external
  std::string endpoint;  // base URL; the protocol path /embed is appended
  double timeout_s = 30.0;
  int retries = 2;

  int expected_dim = 128;

  bool is_builtin() const { return kind == kBuiltinSpectralKind; }
  void validate() const;

  nlohmann::json to_json() const;
  static EmbedderConfig from_json(const nlohmann::json& j);
};

}  // namespace naicl
