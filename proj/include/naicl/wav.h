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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace naicl {

// Mono PCM in [-1, 1].
struct AudioBuffer {
  int sample_rate_hz = 16000;
  std::vector<float> samples;

  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Writes RIFF/WAVE, 16-bit little-endian PCM, mono.
std::string encode_wav(const AudioBuffer& audio);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

// Accepts 16-bit PCM or 32-bit float, any channel count (downmixed to mono).
AudioBuffer decode_wav(std::span<const char> bytes);
AudioBuffer read_wav(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace naicl
