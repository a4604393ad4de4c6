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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "naicl/wav.h"

namespace naicl {

enum class NoiseColor { kWhite, kPink, kBrown, kBandLimited };
enum class Envelope { kFlat, kFadeInOut, kPulsed };

std::string_view to_string(NoiseColor color);
std::string_view to_string(Envelope envelope);
NoiseColor parse_noise_color(std::string_view text);
Envelope parse_envelope(std::string_view text);

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
  bool operator==(const Band&) const = default;
};

struct NoiseSpec {
  NoiseColor color = NoiseColor::kWhite;
  double duration_s = 2.0;
  int sample_rate_hz = 16000;
  std::optional<Band> band;  // present iff color == kBandLimited
  Envelope envelope = Envelope::kFlat;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument / kOutOfRange) when an invariant fails.
  void validate() const;
  std::size_t sample_count() const;

  bool operator==(const NoiseSpec&) const = default;
};

inline constexpr float kPeakAmplitude = 0.5f;
inline constexpr double kMaxDurationS = 600.0;
inline constexpr int kMinSampleRateHz = 8000;
inline constexpr int kMaxSampleRateHz = 192000;

// Deterministic in `spec` (seed included). Output is peak-normalized to
// kPeakAmplitude and has exactly sample_count() samples.
//   white:        uniform i.i.d. samples
//   pink:         Voss-McCartney, 16 rows plus one white term
//   brown:        leaky integration of white, mean removed
//   band_limited: white with every FFT bin outside [low, high] zeroed
AudioBuffer synthesize_noise(const NoiseSpec& spec);

struct ConservativeDescription {
  std::string texture;
  std::string frequency_character;
  std::string temporal_pattern;
  std::string rendered_structured;
  std::string rendered_unstructured;

  const std::string& rendered(bool structured) const {
    return structured ? rendered_structured : rendered_unstructured;
  }
  bool operator==(const ConservativeDescription&) const = default;
};

// Structured form: "A[n] <texture> with <frequency_character>, <temporal_pattern>."
ConservativeDescription render_description(const NoiseSpec& spec);

// Cycles the 4 colors x 3 envelopes grid until `count` specs exist.
// Band-limited entries rotate through a fixed table of bands; seeds are
// derived bijectively from `base_seed` so they are pairwise distinct.
std::vector<NoiseSpec> default_recipe(std::size_t count = 50, double duration_s = 2.0,
                                      std::uint64_t base_seed = 7,
                                      int sample_rate_hz = 16000);

std::vector<NoiseSpec> recipe_by_name(std::string_view name, double duration_s,
                                      std::uint64_t base_seed);

}  // namespace naicl
