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

#include <atomic>
#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "naicl/acoustic_embed.h"
#include "naicl/error.h"
#include "naicl/noise_forge.h"
#include "test_server.h"

namespace naicl {
namespace {

using nlohmann::json;

AudioBuffer noise(NoiseColor color, std::uint64_t seed) {
  NoiseSpec s;
  s.color = color;
  s.seed = seed;
  if (color == NoiseColor::kBandLimited) s.band = Band{300, 1500};
  return synthesize_noise(s);
}

double norm(const Embedding& e) { return std::sqrt(dot(e.values, e.values)); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(BuiltinEmbedder, UnitNormAndDeterministic) {
  const EmbedderConfig cfg;
  for (auto c : {NoiseColor::kWhite, NoiseColor::kPink, NoiseColor::kBrown, NoiseColor::kBandLimited}) {
    const auto a = embed_builtin(noise(c, 1), cfg);
    EXPECT_EQ(a.dim(), 128u);
    EXPECT_EQ(a.kind, kBuiltinSpectralKind);
    EXPECT_NEAR(norm(a), 1.0, 1e-6);
    EXPECT_EQ(a.values, embed_builtin(noise(c, 1), cfg).values);
  }
}

TEST(BuiltinEmbedder, SameColorIsCloserThanOtherColor) {
  const EmbedderConfig cfg;
  const auto w1 = embed_builtin(noise(NoiseColor::kWhite, 1), cfg);
  const auto w2 = embed_builtin(noise(NoiseColor::kWhite, 2), cfg);
  const auto b1 = embed_builtin(noise(NoiseColor::kBrown, 1), cfg);
  EXPECT_GT(dot(w1.values, w2.values), dot(w1.values, b1.values));
}

TEST(BuiltinEmbedder, DimensionFollowsBandCount) {
  EmbedderConfig cfg;
  cfg.mel_bands = 40;
  cfg.expected_dim = 80;
  EXPECT_EQ(embed_builtin(noise(NoiseColor::kPink, 1), cfg).dim(), 80u);
  cfg.expected_dim = 128;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(BuiltinEmbedder, RejectsSilenceAndShortClips) {
  const EmbedderConfig cfg;
  AudioBuffer silent;
  silent.samples.assign(16000, 0.0f);
  EXPECT_EQ(code_of([&] { embed_builtin(silent, cfg); }), ErrorCode::kDegenerateSignal);
  AudioBuffer tiny;
  tiny.samples.assign(100, 0.1f);
  EXPECT_EQ(code_of([&] { embed_builtin(tiny, cfg); }), ErrorCode::kOutOfRange);
}

EmbedderConfig external(const std::string& url, int dim) {
  EmbedderConfig cfg;
  cfg.kind = std::string(kExternalKind);
  cfg.endpoint = url;
  cfg.expected_dim = dim;
  cfg.retries = 2;
  cfg.timeout_s = 5;
  return cfg;
}

testing::TestServer::Handler reply_with(std::size_t n, double fill) {
  return [n, fill](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Content-Type") != "audio/wav" || req.body.substr(0, 4) != "RIFF") {
      res.status = 400;
      return;
    }
    json values = json::array();
    for (std::size_t i = 0; i < n; ++i) values.push_back(fill * static_cast<double>(i % 7 + 1));
    res.set_content(json{{"dim", n}, {"values", values}}.dump(), "application/json");
  };
}

TEST(ExternalEmbedder, AcceptsMatchingDimensionAndRenormalizes) {
  testing::TestServer server("/embed", reply_with(768, 3.0));
  const auto wav = encode_wav(noise(NoiseColor::kWhite, 1));
  const auto e = embed_external_bytes(wav, external(server.url(), 768));
  EXPECT_EQ(e.dim(), 768u);
  EXPECT_EQ(e.kind, kExternalKind);
  EXPECT_NEAR(norm(e), 1.0, 1e-6);
}

TEST(ExternalEmbedder, RejectsDimensionMismatch) {
  testing::TestServer server("/embed", reply_with(512, 1.0));
  const auto wav = encode_wav(noise(NoiseColor::kWhite, 1));
  EXPECT_EQ(code_of([&] { embed_external_bytes(wav, external(server.url(), 768)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(ExternalEmbedder, RejectsNonFiniteValues) {
  testing::TestServer server("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim": 3, "values": [0.1, NaN, 0.2]})", "application/json");
  });
  const auto wav = encode_wav(noise(NoiseColor::kWhite, 1));
  EXPECT_EQ(code_of([&] { embed_external_bytes(wav, external(server.url(), 3)); }), ErrorCode::kNonFinite);
}

TEST(ExternalEmbedder, NullValueCountsAsNonFinite) {
  testing::TestServer server("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim": 3, "values": [0.1, null, 0.2]})", "application/json");
  });
  const auto wav = encode_wav(noise(NoiseColor::kWhite, 1));
  EXPECT_EQ(code_of([&] { embed_external_bytes(wav, external(server.url(), 3)); }), ErrorCode::kNonFinite);
}

TEST(ExternalEmbedder, RetriesServerErrorsThenSucceeds) {
  std::atomic<int> calls{0};
  auto ok = reply_with(4, 1.0);
  testing::TestServer server("/embed", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 503;
      return;
    }
    ok(req, res);
  });
  const auto e = embed_external_bytes(encode_wav(noise(NoiseColor::kWhite, 1)), external(server.url(), 4));
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(e.dim(), 4u);
}

TEST(ExternalEmbedder, ClientErrorIsNotRetried) {
  std::atomic<int> calls{0};
  testing::TestServer server("/embed", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  EXPECT_EQ(code_of([&] {
              embed_external_bytes(encode_wav(noise(NoiseColor::kWhite, 1)), external(server.url(), 4));
            }),
            ErrorCode::kClientError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(ExternalEmbedder, UnreachableEndpointIsTransportError) {
  auto cfg = external("http://127.0.0.1:1", 4);
  cfg.retries = 0;
  cfg.timeout_s = 1;
  EXPECT_EQ(code_of([&] { embed_external_bytes(encode_wav(noise(NoiseColor::kWhite, 1)), cfg); }),
            ErrorCode::kTransport);
}

TEST(ExternalEmbedder, EndpointPathPrefixIsKept) {
  testing::TestServer server("/v1/embed", reply_with(4, 1.0));
  EXPECT_EQ(embed_external_bytes(encode_wav(noise(NoiseColor::kWhite, 1)), external(server.url() + "/v1", 4))
                .dim(),
            4u);
}

}  // namespace
}  // namespace naicl
