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

#include "naicl/prior_library.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "naicl/error.h"
#include "naicl/wav.h"

namespace naicl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Embedding helpers

Embedding make_unit_embedding(std::string kind, std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorCode::kDimensionMismatch, "embedding has zero dimension");
  double sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "embedding contains a non-finite value");
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kDegenerateSignal, "embedding has zero norm");
  }
  Embedding e;
  e.kind = std::move(kind);
  e.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) e.values[i] = static_cast<float>(raw[i] / norm);
  return e;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

void EmbedderConfig::validate() const {
  if (expected_dim <= 0) throw Error(ErrorCode::kInvalidArgument, "expected_dim must be positive");
  if (kind == kBuiltinSpectralKind) {
    if (mel_bands <= 0 || frame_ms <= 0.0 || hop_ms <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "builtin embedder parameters must be positive");
    }
    if (expected_dim != 2 * mel_bands) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("builtin embedder produces {} dims, expected_dim is {}", 2 * mel_bands,
                              expected_dim));
    }
  } else if (kind == kExternalKind) {
    if (endpoint.empty()) throw Error(ErrorCode::kInvalidArgument, "external embedder needs an endpoint");
    if (timeout_s <= 0.0 || retries < 0) {
      throw Error(ErrorCode::kInvalidArgument, "external embedder limits must be positive");
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown embedder kind: " + kind);
  }
}

json EmbedderConfig::to_json() const {
  json j{{"kind", kind}, {"expected_dim", expected_dim}};
  if (is_builtin()) {
    j["mel_bands"] = mel_bands;
    j["frame_ms"] = frame_ms;
    j["hop_ms"] = hop_ms;
  } else {
    j["endpoint"] = endpoint;
  }
  return j;
}

EmbedderConfig EmbedderConfig::from_json(const json& j) {
  EmbedderConfig c;
  c.kind = j.at("kind").get<std::string>();
  c.expected_dim = j.at("expected_dim").get<int>();
  if (c.is_builtin()) {
    c.mel_bands = j.at("mel_bands").get<int>();
    c.frame_ms = j.at("frame_ms").get<double>();
    c.hop_ms = j.at("hop_ms").get<double>();
  } else {
    c.endpoint = j.value("endpoint", "");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Manifest

const NoisePriorEntry* PriorLibrary::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

bool PriorLibrary::fully_embedded() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.embedding.has_value(); });
}

json spec_to_json(const NoiseSpec& spec) {
  json j{{"color", to_string(spec.color)},
         {"duration_s", spec.duration_s},
         {"sample_rate_hz", spec.sample_rate_hz},
         {"envelope", to_string(spec.envelope)},
         {"seed", spec.seed}};
  j["band"] = spec.band ? json::array({spec.band->low_hz, spec.band->high_hz}) : json(nullptr);
  return j;
}

NoiseSpec spec_from_json(const json& j) {
  NoiseSpec s;
  s.color = parse_noise_color(j.at("color").get<std::string>());
  s.duration_s = j.at("duration_s").get<double>();
  s.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  s.envelope = parse_envelope(j.at("envelope").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("band") && !j.at("band").is_null()) {
    const auto& b = j.at("band");
    s.band = Band{b.at(0).get<double>(), b.at(1).get<double>()};
  }
  s.validate();
  return s;
}

json entry_to_json(const NoisePriorEntry& entry) {
  const auto& d = entry.description;
  return json{{"id", entry.id},
              {"spec", spec_to_json(entry.spec)},
              {"audio_path", entry.audio_path.generic_string()},
              {"description",
               {{"texture", d.texture},
                {"frequency_character", d.frequency_character},
                {"temporal_pattern", d.temporal_pattern},
                {"rendered_structured", d.rendered_structured},
                {"rendered_unstructured", d.rendered_unstructured}}},
              {"embedding", nullptr}};
}

NoisePriorEntry entry_from_json(const json& j) {
  NoisePriorEntry e;
  e.id = j.at("id").get<std::string>();
  e.spec = spec_from_json(j.at("spec"));
  e.audio_path = j.at("audio_path").get<std::string>();
  const auto& d = j.at("description");
  e.description.texture = d.at("texture").get<std::string>();
  e.description.frequency_character = d.at("frequency_character").get<std::string>();
  e.description.temporal_pattern = d.at("temporal_pattern").get<std::string>();
  e.description.rendered_structured = d.at("rendered_structured").get<std::string>();
  e.description.rendered_unstructured = d.at("rendered_unstructured").get<std::string>();
  return e;
}

void write_manifest(const std::filesystem::path& path, std::span<const NoisePriorEntry> entries) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write manifest: " + path.string());
  for (const auto& e : entries) os << entry_to_json(e).dump() << '\n';
  if (!os) throw Error(ErrorCode::kIo, "manifest write failed: " + path.string());
}

std::vector<NoisePriorEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read library manifest: " + path.string());
  std::vector<NoisePriorEntry> entries;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto e = entry_from_json(json::parse(line));
      if (!ids.insert(e.id).second) {
        throw Error(ErrorCode::kDuplicateId, "duplicate library entry id '" + e.id + "'");
      }
      entries.push_back(std::move(e));
    } catch (const Error& err) {
      throw Error(err.code(), fmt::format("{}:{}: {}", path.string(), line_no, err.what()));
    } catch (const json::exception& err) {
      throw Error(ErrorCode::kFormat, fmt::format("{}:{}: {}", path.string(), line_no, err.what()));
    }
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Sidecar

static_assert(std::endian::native == std::endian::little, "sidecar rows are written in host order");

void write_sidecar(const std::filesystem::path& path, const PriorLibrary& library) {
  if (!library.embedder) throw Error(ErrorCode::kMissingEmbedding, "library has no embedder config");
  std::size_t dim = 0;
  for (const auto& e : library.entries) {
    if (!e.embedding) throw Error(ErrorCode::kMissingEmbedding, "entry '" + e.id + "' has no embedding");
    if (dim == 0) dim = e.embedding->dim();
    if (e.embedding->dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "entry '" + e.id + "' has a different dimension");
    }
  }
  const json header{{"kind", library.embedder->kind},
                    {"dim", dim},
                    {"count", library.entries.size()},
                    {"embedder", library.embedder->to_json()}};
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write sidecar: " + path.string());
  const std::string head = header.dump() + "\n";
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& e : library.entries) {
    os.write(reinterpret_cast<const char*>(e.embedding->values.data()),
             static_cast<std::streamsize>(dim * sizeof(float)));
  }
  if (!os) throw Error(ErrorCode::kIo, "sidecar write failed: " + path.string());
}

SidecarHeader read_sidecar(const std::filesystem::path& path, std::vector<std::vector<float>>* rows) {
  const std::string bytes = read_file(path);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw Error(ErrorCode::kFormat, "sidecar has no header line: " + path.string());
  SidecarHeader h;
  try {
    const json header = json::parse(bytes.substr(0, nl));
    h.kind = header.at("kind").get<std::string>();
    h.dim = header.at("dim").get<std::size_t>();
    h.count = header.at("count").get<std::size_t>();
    h.embedder = EmbedderConfig::from_json(header.at("embedder"));
  } catch (const json::exception& err) {
    throw Error(ErrorCode::kFormat, "bad sidecar header in " + path.string() + ": " + err.what());
  }
  const std::size_t payload = bytes.size() - nl - 1;
  if (payload != h.dim * h.count * sizeof(float)) {
    throw Error(ErrorCode::kFormat,
                fmt::format("sidecar {} holds {} bytes, header promises {}x{} floats", path.string(),
                            payload, h.count, h.dim));
  }
  if (rows) {
    rows->assign(h.count, std::vector<float>(h.dim));
    const char* p = bytes.data() + nl + 1;
    for (auto& row : *rows) {
      std::memcpy(row.data(), p, h.dim * sizeof(float));
      p += h.dim * sizeof(float);
    }
  }
  return h;
}

PriorLibrary load_library(const std::filesystem::path& root) {
  PriorLibrary lib;
  lib.root = root;
  lib.entries = read_manifest(root / kManifestFileName);
  const auto sidecar = root / kSidecarFileName;
  if (std::filesystem::exists(sidecar)) {
    std::vector<std::vector<float>> rows;
    const auto h = read_sidecar(sidecar, &rows);
    if (h.count != lib.entries.size()) {
      throw Error(ErrorCode::kFormat, fmt::format("sidecar has {} rows but manifest has {} entries",
                                                  h.count, lib.entries.size()));
    }
    lib.embedder = h.embedder;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      lib.entries[i].embedding = Embedding{h.kind, std::move(rows[i])};
    }
  }
  return lib;
}

void save_library(const PriorLibrary& library) {
  std::filesystem::create_directories(library.root);
  write_manifest(library.root / kManifestFileName, library.entries);
  if (library.fully_embedded()) write_sidecar(library.root / kSidecarFileName, library);
}

// ---------------------------------------------------------------------------
// build_library

std::string entry_id_for(std::size_t index, const NoiseSpec& spec) {
  return fmt::format("noise-{:03d}-{}-{}", index, to_string(spec.color), to_string(spec.envelope));
}

PriorLibrary build_library(std::span<const NoiseSpec> specs, const std::filesystem::path& out_dir) {
  if (specs.empty()) throw Error(ErrorCode::kEmpty, "empty library: no noise specs given");
  std::set<std::uint64_t> seeds;
  for (const auto& s : specs) {
    s.validate();
    if (!seeds.insert(s.seed).second) {
      throw Error(ErrorCode::kDuplicateId, fmt::format("duplicate noise seed {}", s.seed));
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "audio", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (out_dir / "audio").string() + ": " + ec.message());

  PriorLibrary lib;
  lib.root = out_dir;
  lib.entries.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    NoisePriorEntry e;
    e.spec = specs[i];
    e.id = entry_id_for(i, e.spec);
    e.audio_path = std::filesystem::path("audio") / (e.id + ".wav");
    e.description = render_description(e.spec);
    write_wav(out_dir / e.audio_path, synthesize_noise(e.spec));
    lib.entries.push_back(std::move(e));
  }
  // A stale sidecar would pair old vectors with new audio.
  std::filesystem::remove(out_dir / kSidecarFileName, ec);
  write_manifest(out_dir / kManifestFileName, lib.entries);
  return lib;
}

}  // namespace naicl
