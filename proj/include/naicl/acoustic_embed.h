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

#include <filesystem>
#include <string>

#include "naicl/embedding.h"
#include "naicl/prior_library.h"
#include "naicl/wav.h"

namespace naicl {

// Log-mel spectrogram (Hann frames, power spectrum, triangular HTK-mel
// filters), pooled to per-band mean and standard deviation, L2-normalized.
// Throws kOutOfRange for audio shorter than one frame and kDegenerateSignal
// for all-zero audio.
Embedding embed_builtin(const AudioBuffer& audio, const EmbedderConfig& cfg);

// Embedding Protocol: POST <endpoint>/embed with WAV bytes, reply
// {"dim": D, "values": [...]}. Transport errors and 5xx are retried
// cfg.retries times; the reply is checked against cfg.expected_dim and
// re-normalized.
Embedding embed_external_bytes(const std::string& wav_bytes, const EmbedderConfig& cfg);
Embedding embed_external(const std::filesystem::path& audio_path, const EmbedderConfig& cfg);

// Dispatches on cfg.kind.
Embedding embed_file(const std::filesystem::path& audio_path, const EmbedderConfig& cfg);

// Embeds every entry (in manifest order), checks each WAV against its spec
// duration, then rewrites the manifest and the sidecar. A failing entry
// aborts with its id in the message.
void embed_library(PriorLibrary& library, const EmbedderConfig& cfg);

inline constexpr double kDurationToleranceS = 0.010;

}  // namespace naicl
