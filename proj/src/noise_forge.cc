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

#include "naicl/noise_forge.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fft.h"
#include "naicl/error.h"

namespace naicl {
namespace {

constexpr int kPinkRows = 16;
constexpr double kBrownLeak = 0.999;
constexpr double kPulseRateHz = 2.0;
constexpr double kPulseFloor = 0.1;
constexpr double kMaxFadeS = 0.5;

constexpr std::array<Band, 5> kRecipeBands = {{
    {100.0, 800.0},
    {300.0, 1500.0},
    {800.0, 3000.0},
    {2000.0, 5000.0},
    {4000.0, 7000.0},
}};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() {
    const std::uint64_t bits = engine_() >> 11;
    return static_cast<double>(bits) * 0x1.0p-52 - 1.0;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> white(std::size_t n, UniformSource& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = rng.next();
  return out;
}

std::vector<double> pink(std::size_t n, UniformSource& rng) {
  std::array<double, kPinkRows> rows{};
  double running = 0.0;
  for (auto& r : rows) {
    r = rng.next();
    running += r;
  }
  constexpr std::uint32_t mask = (1u << kPinkRows) - 1u;
  std::uint32_t counter = 0;
  std::vector<double> out(n);
  for (auto& v : out) {
    counter = (counter + 1) & mask;
    if (counter != 0) {
      const int row = std::countr_zero(counter);
      running -= rows[row];
      rows[row] = rng.next();
      running += rows[row];
    }
    v = running + rng.next();
  }
  return out;
}

std::vector<double> brown(std::size_t n, UniformSource& rng) {
  std::vector<double> out(n);
  double acc = 0.0;
  for (auto& v : out) {
    acc = kBrownLeak * acc + rng.next();
    v = acc;
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(n);
  for (auto& v : out) v -= mean;
  return out;
}

std::vector<double> band_limited(std::size_t n, int rate, const Band& band, UniformSource& rng) {
  detail::RealFft fft(n);
  const auto noise = white(n, rng);
  std::copy(noise.begin(), noise.end(), fft.time().begin());
  fft.forward();
  auto spec = fft.spectrum();
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f < band.low_hz || f > band.high_hz) spec[k] = 0.0;
  }
  fft.inverse();
  return {fft.time().begin(), fft.time().end()};
}

void apply_envelope(std::vector<double>& x, int rate, double duration_s, Envelope envelope) {
  switch (envelope) {
    case Envelope::kFlat:
      return;
    case Envelope::kFadeInOut: {
      const auto fade = static_cast<std::size_t>(
          std::min(kMaxFadeS, duration_s / 4.0) * static_cast<double>(rate));
      if (fade == 0) return;
      for (std::size_t i = 0; i < fade && i < x.size(); ++i) {
        const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(fade));
        x[i] *= g;
        x[x.size() - 1 - i] *= g;
      }
      return;
    }
    case Envelope::kPulsed: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(rate);
        const double gate = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * kPulseRateHz * t);
        x[i] *= kPulseFloor + (1.0 - kPulseFloor) * gate;
      }
      return;
    }
  }
}

std::string hz(double v) { return fmt::format("{:.0f}", v); }

std::string_view article(std::string_view word) {
  return !word.empty() && std::string_view("aeiou").find(word.front()) != std::string_view::npos ? "An" : "A";
}

}  // namespace

std::string_view to_string(NoiseColor color) {
  switch (color) {
    case NoiseColor::kWhite: return "white";
    case NoiseColor::kPink: return "pink";
    case NoiseColor::kBrown: return "brown";
    case NoiseColor::kBandLimited: return "band_limited";
  }
  return "unknown";
}

std::string_view to_string(Envelope envelope) {
  switch (envelope) {
    case Envelope::kFlat: return "flat";
    case Envelope::kFadeInOut: return "fade_in_out";
    case Envelope::kPulsed: return "pulsed";
  }
  return "unknown";
}

NoiseColor parse_noise_color(std::string_view text) {
  for (auto c : {NoiseColor::kWhite, NoiseColor::kPink, NoiseColor::kBrown, NoiseColor::kBandLimited}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown noise color: " + std::string(text));
}

Envelope parse_envelope(std::string_view text) {
  for (auto e : {Envelope::kFlat, Envelope::kFadeInOut, Envelope::kPulsed}) {
    if (to_string(e) == text) return e;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown envelope: " + std::string(text));
}

void NoiseSpec::validate() const {
  if (!std::isfinite(duration_s) || duration_s <= 0.0 || duration_s > kMaxDurationS) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("duration_s must be in (0, {}], got {}", kMaxDurationS, duration_s));
  }
  if (sample_rate_hz < kMinSampleRateHz || sample_rate_hz > kMaxSampleRateHz) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("sample_rate_hz must be in [{}, {}], got {}", kMinSampleRateHz,
                            kMaxSampleRateHz, sample_rate_hz));
  }
  if (sample_count() < 2) {
    throw Error(ErrorCode::kOutOfRange, "duration too short for the sample rate");
  }
  const bool wants_band = color == NoiseColor::kBandLimited;
  if (wants_band != band.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                wants_band ? "band_limited noise requires a band"
                           : "band is only valid for band_limited noise");
  }
  if (band) {
    const double nyquist = sample_rate_hz / 2.0;
    if (!(band->low_hz > 0.0 && band->low_hz < band->high_hz && band->high_hz < nyquist)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("invalid band [{}, {}] Hz: need 0 < low < high < {}", band->low_hz,
                              band->high_hz, nyquist));
    }
  }
}

std::size_t NoiseSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

AudioBuffer synthesize_noise(const NoiseSpec& spec) {
  spec.validate();
  const std::size_t n = spec.sample_count();
  UniformSource rng(spec.seed);
  std::vector<double> x;
  switch (spec.color) {
    case NoiseColor::kWhite: x = white(n, rng); break;
    case NoiseColor::kPink: x = pink(n, rng); break;
    case NoiseColor::kBrown: x = brown(n, rng); break;
    case NoiseColor::kBandLimited: x = band_limited(n, spec.sample_rate_hz, *spec.band, rng); break;
  }
  apply_envelope(x, spec.sample_rate_hz, spec.duration_s, spec.envelope);

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) throw Error(ErrorCode::kDegenerateSignal, "synthesized noise is silent");
  const double gain = kPeakAmplitude / peak;

  AudioBuffer out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.resize(n);
  std::transform(x.begin(), x.end(), out.samples.begin(),
                 [gain](double v) { return static_cast<float>(v * gain); });
  return out;
}

ConservativeDescription render_description(const NoiseSpec& spec) {
  ConservativeDescription d;

  std::string_view adjective;
  switch (spec.envelope) {
    case Envelope::kFlat: adjective = "continuous"; d.temporal_pattern = "steady over time"; break;
    case Envelope::kFadeInOut:
      adjective = "slowly swelling";
      d.temporal_pattern = "gradually rising and then fading out";
      break;
    case Envelope::kPulsed:
      adjective = "intermittent";
      d.temporal_pattern = "occurring in regular bursts of energy";
      break;
  }

  std::string_view noun;
  switch (spec.color) {
    case NoiseColor::kWhite:
      noun = "background noise";
      d.frequency_character = "an even spread of energy across all frequencies";
      break;
    case NoiseColor::kPink:
      noun = "broadband hiss";
      d.frequency_character = "energy that softens gradually toward higher frequencies";
      break;
    case NoiseColor::kBrown:
      noun = "rumbling noise";
      d.frequency_character = "mostly low-frequency energy";
      break;
    case NoiseColor::kBandLimited: {
      noun = "band-limited noise";
      const Band b = spec.band.value_or(Band{});
      const std::string_view region =
          b.high_hz <= 1000.0 ? "low-frequency" : (b.low_hz >= 2000.0 ? "high-frequency" : "mid-frequency");
      d.frequency_character = fmt::format("energy confined to a {} band between {} and {} Hz",
                                          region, hz(b.low_hz), hz(b.high_hz));
      break;
    }
  }
  d.texture = fmt::format("{} {}", adjective, noun);

  d.rendered_structured =
      fmt::format("{} {} with {}, {}.", article(d.texture), d.texture, d.frequency_character, d.temporal_pattern);

  std::string lead = d.temporal_pattern;
  lead[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(lead[0])));
  d.rendered_unstructured = fmt::format("{} and carrying {}, this is only {} without any identifiable source.",
                                        lead, d.frequency_character, d.texture);
  return d;
}

std::vector<NoiseSpec> default_recipe(std::size_t count, double duration_s,
                                      std::uint64_t base_seed, int sample_rate_hz) {
  constexpr std::array colors = {NoiseColor::kWhite, NoiseColor::kPink, NoiseColor::kBrown,
                                 NoiseColor::kBandLimited};
  constexpr std::array envelopes = {Envelope::kFlat, Envelope::kFadeInOut, Envelope::kPulsed};
  std::vector<NoiseSpec> specs;
  specs.reserve(count);
  std::size_t band_cursor = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t cell = i % (colors.size() * envelopes.size());
    NoiseSpec s;
    s.color = colors[cell / envelopes.size()];
    s.envelope = envelopes[cell % envelopes.size()];
    s.duration_s = duration_s;
    s.sample_rate_hz = sample_rate_hz;
    s.seed = splitmix64(base_seed + i);
    if (s.color == NoiseColor::kBandLimited) {
      s.band = kRecipeBands[band_cursor++ % kRecipeBands.size()];
    }
    specs.push_back(s);
  }
  return specs;
}

std::vector<NoiseSpec> recipe_by_name(std::string_view name, double duration_s,
                                      std::uint64_t base_seed) {
  if (name == "default") return default_recipe(50, duration_s, base_seed);
  if (name == "grid") return default_recipe(12, duration_s, base_seed);
  throw Error(ErrorCode::kInvalidArgument,
              "unknown recipe '" + std::string(name) + "' (expected default or grid)");
}

}  // namespace naicl
