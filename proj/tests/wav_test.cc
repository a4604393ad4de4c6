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

#include <cstring>

#include <gtest/gtest.h>

#include "naicl/error.h"
#include "naicl/wav.h"

namespace naicl {
namespace {

std::string header(int channels, int bits, int format, int rate, std::uint32_t data_bytes) {
  std::string h;
  auto u32 = [&](std::uint32_t v) { h.append(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { h.append(reinterpret_cast<const char*>(&v), 2); };
  h += "RIFF";
  u32(36 + data_bytes);
  h += "WAVEfmt ";
  u32(16);
  u16(static_cast<std::uint16_t>(format));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  h += "data";
  u32(data_bytes);
  return h;
}

TEST(Wav, RoundTripsPcm16) {
  AudioBuffer a;
  a.sample_rate_hz = 22050;
  for (int i = 0; i < 1000; ++i) a.samples.push_back(static_cast<float>(i % 200 - 100) / 128.0f);
  const std::string bytes = encode_wav(a);
  EXPECT_EQ(bytes.size(), 44u + 2000u);
  const AudioBuffer b = decode_wav(bytes);
  EXPECT_EQ(b.sample_rate_hz, 22050);
  ASSERT_EQ(b.samples.size(), a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(b.samples[i], a.samples[i], 1.0 / 32767);
}

TEST(Wav, EncodingClampsOutOfRangeSamples) {
  AudioBuffer a;
  a.samples = {2.0f, -2.0f};
  const AudioBuffer b = decode_wav(encode_wav(a));
  EXPECT_NEAR(b.samples[0], 1.0f, 1e-4);
  EXPECT_NEAR(b.samples[1], -1.0f, 1e-4);
}

TEST(Wav, DecodesFloatStereoAsMono) {
  std::string bytes = header(2, 32, 3, 8000, 16);
  const float frames[4] = {0.5f, -0.5f, 0.25f, 0.75f};
  bytes.append(reinterpret_cast<const char*>(frames), sizeof(frames));
  const AudioBuffer a = decode_wav(bytes);
  EXPECT_EQ(a.sample_rate_hz, 8000);
  ASSERT_EQ(a.samples.size(), 2u);
  EXPECT_FLOAT_EQ(a.samples[0], 0.0f);
  EXPECT_FLOAT_EQ(a.samples[1], 0.5f);
}

TEST(Wav, RejectsGarbageAndTruncation) {
  const std::string junk = "not a wav file at all, really not";
  try {
    decode_wav(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  AudioBuffer a;
  a.samples.assign(100, 0.1f);
  const std::string bytes = encode_wav(a);
  EXPECT_THROW(decode_wav(std::string_view(bytes).substr(0, 30)), Error);
}

TEST(Wav, RejectsUnsupportedSampleFormat) {
  std::string bytes = header(1, 8, 1, 8000, 4);
  bytes += "abcd";
  EXPECT_THROW(decode_wav(bytes), Error);
}

TEST(Wav, MissingFileIsIoError) {
  try {
    read_wav("/nonexistent/clip.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace naicl
