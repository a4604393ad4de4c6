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

#include "naicl/acoustic_embed.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fft.h"
#include "http_util.h"
#include "naicl/error.h"

namespace naicl {
namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// bands x bins weight matrix, row-major.
std::vector<double> mel_filterbank(int bands, std::size_t nfft, int rate) {
  const std::size_t bins = nfft / 2 + 1;
  const double top = hz_to_mel(rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(bands) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(bands + 1));
  }
  std::vector<double> w(static_cast<std::size_t>(bands) * bins, 0.0);
  for (int b = 0; b < bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / static_cast<double>(nfft);
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      w[static_cast<std::size_t>(b) * bins + k] = std::max(0.0, std::min(rise, fall));
    }
  }
  return w;
}

}  // namespace

Embedding embed_builtin(const AudioBuffer& audio, const EmbedderConfig& cfg) {
  if (!cfg.is_builtin()) throw Error(ErrorCode::kInvalidArgument, "embed_builtin needs a builtin_spectral config");
  cfg.validate();
  if (audio.samples.empty()) throw Error(ErrorCode::kEmpty, "cannot embed empty audio");
  const auto rate = audio.sample_rate_hz;
  const auto frame = static_cast<std::size_t>(std::llround(cfg.frame_ms * rate / 1000.0));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.hop_ms * rate / 1000.0)));
  if (frame == 0 || audio.samples.size() < frame) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("audio has {} samples, shorter than one {} ms frame", audio.samples.size(),
                            cfg.frame_ms));
  }
  if (std::all_of(audio.samples.begin(), audio.samples.end(), [](float s) { return s == 0.0f; })) {
    throw Error(ErrorCode::kDegenerateSignal, "degenerate signal: audio is all zeros");
  }

  const std::size_t nfft = next_pow2(2 * frame);
  const std::size_t bins = nfft / 2 + 1;
  const auto bands = static_cast<std::size_t>(cfg.mel_bands);
  const auto fb = mel_filterbank(cfg.mel_bands, nfft, rate);
  std::vector<double> window(frame);
  for (std::size_t i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(frame));
  }

  detail::RealFft fft(nfft);
  const std::size_t frames = 1 + (audio.samples.size() - frame) / hop;
  std::vector<double> sum(bands, 0.0), sum_sq(bands, 0.0), power(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    auto buf = fft.time();
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < frame; ++i) buf[i] = audio.samples[t * hop + i] * window[i];
    fft.forward();
    for (std::size_t k = 0; k < bins; ++k) power[k] = std::norm(fft.spectrum()[k]);
    for (std::size_t b = 0; b < bands; ++b) {
      double e = 0.0;
      const double* row = fb.data() + b * bins;
      for (std::size_t k = 0; k < bins; ++k) e += row[k] * power[k];
      const double v = std::log(e + kLogFloor);
      sum[b] += v;
      sum_sq[b] += v * v;
    }
  }
  std::vector<double> pooled(2 * bands);
  const auto n = static_cast<double>(frames);
  for (std::size_t b = 0; b < bands; ++b) {
    const double mean = sum[b] / n;
    pooled[b] = mean;
    pooled[bands + b] = std::sqrt(std::max(0.0, sum_sq[b] / n - mean * mean));
  }
  return make_unit_embedding(std::string(kBuiltinSpectralKind), pooled);
}

Embedding embed_external_bytes(const std::string& wav_bytes, const EmbedderConfig& cfg) {
  if (cfg.kind != kExternalKind) throw Error(ErrorCode::kInvalidArgument, "embed_external needs an external config");
  cfg.validate();
  const auto url = detail::split_url(cfg.endpoint);
  const std::string path = detail::join_path(url.path, "/embed");

  std::string last_error;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << (attempt - 1)));
    auto client = detail::make_client(url.origin, cfg.timeout_s);
    auto res = client->Post(path, wav_bytes, "audio/wav");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kClientError, fmt::format("embedding endpoint returned HTTP {}", res->status));
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      // Python's json module writes bare NaN/Infinity tokens.
      if (res->body.find("NaN") != std::string::npos || res->body.find("Infinity") != std::string::npos) {
        throw Error(ErrorCode::kNonFinite, "embedding reply contains a non-finite value");
      }
      throw Error(ErrorCode::kMalformedResponse, std::string("embedding reply is not JSON: ") + e.what());
    }
    if (!body.is_object() || !body.contains("values") || !body["values"].is_array()) {
      throw Error(ErrorCode::kMalformedResponse, "embedding reply lacks a values array");
    }
    std::vector<double> raw;
    raw.reserve(body["values"].size());
    for (const auto& v : body["values"]) {
      // NaN/Inf cannot be encoded in JSON; null is how serializers emit them.
      if (!v.is_number()) throw Error(ErrorCode::kNonFinite, "embedding reply contains a non-finite value");
      raw.push_back(v.get<double>());
    }
    const auto declared = body.value("dim", static_cast<std::int64_t>(raw.size()));
    if (declared != static_cast<std::int64_t>(raw.size())) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("embedding reply declares dim {} but carries {} values", declared, raw.size()));
    }
    if (raw.size() != static_cast<std::size_t>(cfg.expected_dim)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("dimension mismatch: got {}, expected {}", raw.size(), cfg.expected_dim));
    }
    return make_unit_embedding(std::string(kExternalKind), raw);
  }
  throw Error(ErrorCode::kTransport,
              fmt::format("embedding endpoint failed after {} attempts: {}", cfg.retries + 1, last_error));
}

Embedding embed_external(const std::filesystem::path& audio_path, const EmbedderConfig& cfg) {
  return embed_external_bytes(read_file(audio_path), cfg);
}

Embedding embed_file(const std::filesystem::path& audio_path, const EmbedderConfig& cfg) {
  if (cfg.is_builtin()) return embed_builtin(read_wav(audio_path), cfg);
  return embed_external(audio_path, cfg);
}

void embed_library(PriorLibrary& library, const EmbedderConfig& cfg) {
  cfg.validate();
  if (library.entries.empty()) throw Error(ErrorCode::kEmpty, "cannot embed an empty library");
  std::vector<Embedding> out;
  out.reserve(library.entries.size());
  for (const auto& entry : library.entries) {
    try {
      const auto path = library.resolve(entry);
      AudioBuffer audio = read_wav(path);
      if (std::abs(audio.duration_s() - entry.spec.duration_s) > kDurationToleranceS) {
        throw Error(ErrorCode::kFormat, fmt::format("audio lasts {:.3f} s, spec says {:.3f} s",
                                                    audio.duration_s(), entry.spec.duration_s));
      }
      out.push_back(cfg.is_builtin() ? embed_builtin(audio, cfg) : embed_external(path, cfg));
      if (out.back().dim() != out.front().dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "embedding dimension changed mid-library");
      }
    } catch (const Error& e) {
      throw Error(e.code(), "library entry '" + entry.id + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) library.entries[i].embedding = std::move(out[i]);
  library.embedder = cfg;
  save_library(library);
}

}  // namespace naicl
