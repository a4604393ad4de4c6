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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "naicl/error.h"
#include "naicl/keywords.h"
#include "naicl/noise_forge.h"
#include "oracles.h"

namespace naicl {
namespace {

NoiseSpec spec(NoiseColor color, std::uint64_t seed, Envelope env = Envelope::kFlat) {
  NoiseSpec s;
  s.color = color;
  s.seed = seed;
  s.envelope = env;
  if (color == NoiseColor::kBandLimited) s.band = Band{800.0, 3000.0};
  return s;
}

float peak(const AudioBuffer& a) {
  float p = 0.0f;
  for (float v : a.samples) p = std::max(p, std::abs(v));
  return p;
}

TEST(NoiseForge, SameSpecGivesIdenticalSamples) {
  for (auto c : {NoiseColor::kWhite, NoiseColor::kPink, NoiseColor::kBrown, NoiseColor::kBandLimited}) {
    const auto a = synthesize_noise(spec(c, 11));
    const auto b = synthesize_noise(spec(c, 11));
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, synthesize_noise(spec(c, 12)).samples);
  }
}

TEST(NoiseForge, LengthAndPeakNormalization) {
  for (auto env : {Envelope::kFlat, Envelope::kFadeInOut, Envelope::kPulsed}) {
    auto s = spec(NoiseColor::kPink, 3, env);
    s.duration_s = 1.5;
    s.sample_rate_hz = 22050;
    const auto a = synthesize_noise(s);
    EXPECT_EQ(a.samples.size(), 33075u);
    EXPECT_EQ(a.sample_rate_hz, 22050);
    EXPECT_NEAR(peak(a), kPeakAmplitude, 1e-6);
  }
}

TEST(NoiseForge, FadeStartsAndEndsSilent) {
  const auto a = synthesize_noise(spec(NoiseColor::kWhite, 5, Envelope::kFadeInOut));
  EXPECT_EQ(a.samples.front(), 0.0f);
  EXPECT_LT(std::abs(a.samples.back()), 1e-3);
}

TEST(NoiseForge, SpectralSlopesPerColor) {
  const std::size_t seg = 4096;
  const struct {
    NoiseColor color;
    double target;
  } cases[] = {{NoiseColor::kWhite, 0.0}, {NoiseColor::kPink, -3.0}, {NoiseColor::kBrown, -6.0}};
  for (const auto& c : cases) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto a = synthesize_noise(spec(c.color, seed));
      const double slope =
          oracle::third_octave_slope(oracle::welch_psd(a.samples, seg), 16000.0, seg, 50.0, 4000.0);
      EXPECT_NEAR(slope, c.target, 1.0) << to_string(c.color) << " seed " << seed;
    }
  }
}

TEST(NoiseForge, BandLimitedRejectsOutOfBandEnergy) {
  const std::size_t seg = 4096;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = synthesize_noise(spec(NoiseColor::kBandLimited, seed));
    const double r = oracle::band_rejection_db(oracle::welch_psd(a.samples, seg), 16000.0, seg, 800, 3000, 50);
    EXPECT_GE(r, 30.0);
  }
}

TEST(NoiseForge, ValidationErrors) {
  auto expect_code = [](NoiseSpec s, ErrorCode code) {
    try {
      s.validate();
      FAIL() << "accepted invalid spec";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  auto s = spec(NoiseColor::kWhite, 1);
  s.duration_s = 0.0;
  expect_code(s, ErrorCode::kOutOfRange);
  s = spec(NoiseColor::kWhite, 1);
  s.sample_rate_hz = 4000;
  expect_code(s, ErrorCode::kOutOfRange);
  s = spec(NoiseColor::kBandLimited, 1);
  s.band.reset();
  expect_code(s, ErrorCode::kInvalidArgument);
  s = spec(NoiseColor::kBandLimited, 1);
  s.band = Band{3000.0, 800.0};
  expect_code(s, ErrorCode::kInvalidArgument);
  s = spec(NoiseColor::kBandLimited, 1);
  s.band = Band{1000.0, 9000.0};
  expect_code(s, ErrorCode::kInvalidArgument);
  s = spec(NoiseColor::kWhite, 1);
  s.band = Band{100.0, 200.0};
  expect_code(s, ErrorCode::kInvalidArgument);
}

TEST(NoiseForge, DefaultRecipeCoversGridWithDistinctSeeds) {
  const auto specs = default_recipe();
  ASSERT_EQ(specs.size(), 50u);
  std::set<std::uint64_t> seeds;
  std::set<std::pair<NoiseColor, Envelope>> cells;
  for (const auto& s : specs) {
    s.validate();
    seeds.insert(s.seed);
    cells.insert({s.color, s.envelope});
    EXPECT_EQ(s.duration_s, 2.0);
  }
  EXPECT_EQ(seeds.size(), 50u);
  EXPECT_EQ(cells.size(), 12u);
  EXPECT_EQ(recipe_by_name("grid", 2.0, 7).size(), 12u);
  EXPECT_EQ(recipe_by_name("default", 10.0, 7).front().duration_s, 10.0);
  EXPECT_THROW(recipe_by_name("nope", 2.0, 7), Error);
}

TEST(NoiseForge, DescriptionsAvoidEventTerms) {
  const auto& event = default_event_matcher();
  for (const auto& s : default_recipe()) {
    const auto d = render_description(s);
    EXPECT_FALSE(event.matches(d.rendered_structured)) << d.rendered_structured;
    EXPECT_FALSE(event.matches(d.rendered_unstructured)) << d.rendered_unstructured;
    EXPECT_NE(d.rendered_structured, d.rendered_unstructured);
    EXPECT_NE(d.rendered_structured.find(d.texture), std::string::npos);
    EXPECT_NE(d.rendered_unstructured.find(d.frequency_character), std::string::npos);
  }
}

TEST(NoiseForge, DescriptionWording) {
  auto s = spec(NoiseColor::kBrown, 1, Envelope::kFlat);
  EXPECT_EQ(render_description(s).rendered_structured,
            "A continuous rumbling noise with mostly low-frequency energy, steady over time.");
  s = spec(NoiseColor::kWhite, 1, Envelope::kPulsed);
  EXPECT_EQ(render_description(s).rendered_structured.substr(0, 16), "An intermittent ");
}

TEST(NoiseForge, ParsesNames) {
  EXPECT_EQ(parse_noise_color("band_limited"), NoiseColor::kBandLimited);
  EXPECT_EQ(parse_envelope("fade_in_out"), Envelope::kFadeInOut);
  EXPECT_THROW(parse_noise_color("purple"), Error);
}

}  // namespace
}  // namespace naicl
