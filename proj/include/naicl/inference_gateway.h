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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/context_builder.h"
#include "naicl/error.h"

namespace naicl {

enum class BackendKind { kHttpChatAudio, kMock };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

struct BackendLimits {
  int max_concurrency = 4;
  double timeout_s = 120.0;
  int retries = 3;
  int backoff_ms = 500;
};

struct BackendConfig {
  std::string name;
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;  // full URL for http_chat_audio
  std::string model;
  std::string api_key_env;  // name of the env var holding the bearer token
  BackendLimits limits;
  bool inline_audio = true;             // base64 audio parts; false sends paths
  std::filesystem::path audit_log;      // optional JSONL of requests/replies
  std::filesystem::path mock_fixture;   // mock: JSON {id: reply | [replies...], "*": default}

  void validate() const;
  // Settings that influence outputs. Concurrency, timeouts and secrets are
  // left out so equal configurations serialize identically.
  nlohmann::json snapshot() const;
};

// status == 0 means the request never produced an HTTP response.
struct TransportReply {
  int status = 0;
  std::string body;
  std::string transport_error;
  bool timed_out = false;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual const BackendConfig& config() const = 0;
  virtual TransportReply send(const AssembledRequest& request) = 0;
};

// POSTs {model, messages, temperature, max_tokens} and expects
// {"caption": "..."}.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);
  const BackendConfig& config() const override { return config_; }
  TransportReply send(const AssembledRequest& request) override;

  nlohmann::json payload(const AssembledRequest& request) const;

 private:
  BackendConfig config_;
  std::string api_key_;
  std::mutex audit_mutex_;
};

// Offline backend: replies come from a responder function, typically a
// scripted fixture. Tracks in-flight requests so tests can observe the
// concurrency bound.
class MockBackend final : public Backend {
 public:
  // call_index counts earlier calls for the same sample id.
  using Responder = std::function<TransportReply(const AssembledRequest&, int call_index)>;

  MockBackend(BackendConfig config, Responder responder,
              std::chrono::milliseconds delay = std::chrono::milliseconds(0));

  // Fixture map: id -> list of replies served in call order (the last one
  // repeats). "*" supplies a default; unknown ids get HTTP 404.
  static std::unique_ptr<MockBackend> scripted(BackendConfig config,
                                               std::map<std::string, std::vector<std::string>> replies);
  static std::map<std::string, std::vector<std::string>> load_fixture(const std::filesystem::path& path);

  const BackendConfig& config() const override { return config_; }
  TransportReply send(const AssembledRequest& request) override;

  int peak_in_flight() const { return peak_.load(); }
  int total_calls() const { return calls_.load(); }

 private:
  BackendConfig config_;
  Responder responder_;
  std::chrono::milliseconds delay_;
  std::mutex mutex_;
  std::map<std::string, int> per_sample_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  std::atomic<int> calls_{0};
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

struct GenerationResult {
  std::string sample_id;
  std::string caption;
  std::string backend;
  std::int64_t latency_ms = 0;
  int attempt = 0;
};

// Retries transport failures and 5xx up to limits.retries times with
// exponential backoff; 4xx fails at once (401/403 as kAuth). The caption is
// returned whitespace-trimmed and must be non-empty.
GenerationResult generate(const AssembledRequest& request, Backend& backend);

struct BatchFailure {
  std::size_t index = 0;
  std::string sample_id;
  ErrorCode code = ErrorCode::kTransport;
  std::string message;
};

struct BatchOutcome {
  std::vector<std::optional<GenerationResult>> results;  // input order
  std::vector<BatchFailure> failures;                    // ascending index

  double failure_rate() const {
    return results.empty() ? 0.0 : static_cast<double>(failures.size()) / results.size();
  }
};

inline constexpr double kDefaultAbortThreshold = 0.10;

// Fail-soft: per-request errors are recorded and the batch continues. The
// effective concurrency is min(concurrency, limits.max_concurrency).
BatchOutcome generate_batch(const std::vector<AssembledRequest>& requests, Backend& backend,
                            std::size_t concurrency);

// Sends one request and returns the raw reply text (the "caption" field),
// shared by the generator and the judge.
std::string complete_text(const AssembledRequest& request, Backend& backend, int* attempts = nullptr);

}  // namespace naicl
