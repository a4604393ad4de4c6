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

#include "naicl/inference_gateway.h"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "http_util.h"
#include "naicl/bounded_pool.h"

namespace naicl {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

TransportReply caption_reply(const std::string& text) {
  return {200, json{{"caption", text}}.dump(), {}, false};
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttpChatAudio: return "http_chat_audio";
    case BackendKind::kMock: return "mock";
  }
  return "unknown";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "http_chat_audio" || text == "http") return BackendKind::kHttpChatAudio;
  if (text == "mock") return BackendKind::kMock;
  throw Error(ErrorCode::kInvalidArgument, "unknown backend kind: " + std::string(text));
}

void BackendConfig::validate() const {
  if (limits.max_concurrency < 1 || limits.timeout_s <= 0.0 || limits.retries < 0 || limits.backoff_ms < 0) {
    throw Error(ErrorCode::kInvalidArgument, "backend '" + name + "': limits must be positive");
  }
  if (kind == BackendKind::kHttpChatAudio && endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "backend '" + name + "': http backend needs an endpoint");
  }
}

json BackendConfig::snapshot() const {
  json j{{"name", name}, {"kind", to_string(kind)}};
  if (kind == BackendKind::kHttpChatAudio) {
    j["endpoint"] = endpoint;
    j["model"] = model;
    j["inline_audio"] = inline_audio;
  } else {
    j["fixture"] = mock_fixture.generic_string();
  }
  j["retries"] = limits.retries;
  return j;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

json HttpBackend::payload(const AssembledRequest& request) const {
  json body = to_json(request, config_.inline_audio ? AudioEncoding::kBase64 : AudioEncoding::kPath);
  return json{{"model", config_.model},
              {"messages", body["messages"]},
              {"temperature", request.decode.temperature},
              {"max_tokens", request.decode.max_tokens}};
}

TransportReply HttpBackend::send(const AssembledRequest& request) {
  const auto url = detail::split_url(config_.endpoint);
  auto client = detail::make_client(url.origin, config_.limits.timeout_s);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const std::string body = payload(request).dump();
  auto res = client->Post(url.path.empty() ? "/" : url.path, headers, body, "application/json");

  TransportReply reply;
  if (!res) {
    reply.transport_error = httplib::to_string(res.error());
    reply.timed_out = res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout;
  } else {
    reply.status = res->status;
    reply.body = res->body;
  }
  if (!config_.audit_log.empty()) {
    const json line{{"backend", config_.name},
                    {"sample_id", request.sample_id},
                    {"request", to_json(request, AudioEncoding::kPath)},
                    {"status", reply.status},
                    {"response", reply.body},
                    {"transport_error", reply.transport_error}};
    std::lock_guard lock(audit_mutex_);
    std::ofstream os(config_.audit_log, std::ios::app);
    os << line.dump() << '\n';
  }
  return reply;
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(BackendConfig config, Responder responder, std::chrono::milliseconds delay)
    : config_(std::move(config)), responder_(std::move(responder)), delay_(delay) {}

std::unique_ptr<MockBackend> MockBackend::scripted(BackendConfig config,
                                                   std::map<std::string, std::vector<std::string>> replies) {
  auto responder = [replies = std::move(replies)](const AssembledRequest& req, int call) -> TransportReply {
    auto it = replies.find(req.sample_id);
    if (it == replies.end()) it = replies.find("*");
    if (it == replies.end() || it->second.empty()) {
      return {404, json{{"error", "no scripted reply for " + req.sample_id}}.dump(), {}, false};
    }
    const auto& seq = it->second;
    return caption_reply(seq[std::min<std::size_t>(static_cast<std::size_t>(call), seq.size() - 1)]);
  };
  return std::make_unique<MockBackend>(std::move(config), std::move(responder));
}

std::map<std::string, std::vector<std::string>> MockBackend::load_fixture(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "mock fixture " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "mock fixture must be a JSON object: " + path.string());
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [id, v] : j.items()) {
    auto as_text = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array()) {
      for (const auto& x : v) out[id].push_back(as_text(x));
    } else {
      out[id].push_back(as_text(v));
    }
  }
  return out;
}

TransportReply MockBackend::send(const AssembledRequest& request) {
  const int now = ++in_flight_;
  int prev = peak_.load();
  while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
  }
  ++calls_;
  int call = 0;
  {
    std::lock_guard lock(mutex_);
    call = per_sample_[request.sample_id]++;
  }
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  TransportReply reply = responder_(request, call);
  --in_flight_;
  return reply;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::kHttpChatAudio) return std::make_unique<HttpBackend>(config);
  if (config.mock_fixture.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mock backend '" + config.name + "' needs a fixture file");
  }
  return MockBackend::scripted(config, MockBackend::load_fixture(config.mock_fixture));
}

// ---------------------------------------------------------------------------
// generate

std::string complete_text(const AssembledRequest& request, Backend& backend, int* attempts) {
  const auto& limits = backend.config().limits;
  std::string last_error;
  bool last_timed_out = false;
  for (int attempt = 1; attempt <= limits.retries + 1; ++attempt) {
    if (attempts) *attempts = attempt;
    if (attempt > 1 && limits.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(limits.backoff_ms) * (1 << (attempt - 2)));
    }
    const TransportReply reply = backend.send(request);
    if (reply.status == 0 || reply.status >= 500) {
      last_error = reply.status == 0 ? "transport: " + reply.transport_error : fmt::format("HTTP {}", reply.status);
      last_timed_out = reply.status == 0 && reply.timed_out;
      spdlog::debug("{}: sample {} attempt {} failed ({})", backend.config().name, request.sample_id, attempt,
                    last_error);
      continue;
    }
    if (reply.status == 401 || reply.status == 403) {
      throw Error(ErrorCode::kAuth, fmt::format("{}: HTTP {} for sample {}", backend.config().name,
                                                reply.status, request.sample_id));
    }
    if (reply.status != 200) {
      throw Error(ErrorCode::kClientError, fmt::format("{}: HTTP {} for sample {}: {}", backend.config().name,
                                                       reply.status, request.sample_id, reply.body));
    }
    json body;
    try {
      body = json::parse(reply.body);
    } catch (const json::exception&) {
      throw Error(ErrorCode::kMalformedResponse,
                  fmt::format("{}: reply for {} is not JSON", backend.config().name, request.sample_id));
    }
    if (!body.is_object() || !body.contains("caption") || !body["caption"].is_string()) {
      throw Error(ErrorCode::kMalformedResponse,
                  fmt::format("{}: reply for {} has no caption string", backend.config().name, request.sample_id));
    }
    return body["caption"].get<std::string>();
  }
  throw Error(last_timed_out ? ErrorCode::kTimeout : ErrorCode::kRetriesExhausted,
              fmt::format("{}: sample {} failed after {} attempts: {}", backend.config().name, request.sample_id,
                          limits.retries + 1, last_error));
}

GenerationResult generate(const AssembledRequest& request, Backend& backend) {
  const auto start = std::chrono::steady_clock::now();
  GenerationResult out;
  out.sample_id = request.sample_id;
  out.backend = backend.config().name;
  out.caption = trim(complete_text(request, backend, &out.attempt));
  if (out.caption.empty()) {
    throw Error(ErrorCode::kMalformedResponse,
                fmt::format("{}: empty caption for sample {}", backend.config().name, request.sample_id));
  }
  out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

BatchOutcome generate_batch(const std::vector<AssembledRequest>& requests, Backend& backend,
                            std::size_t concurrency) {
  if (concurrency < 1) throw Error(ErrorCode::kInvalidArgument, "concurrency must be >= 1");
  const auto limit = static_cast<std::size_t>(backend.config().limits.max_concurrency);
  BatchOutcome outcome;
  outcome.results.resize(requests.size());
  std::vector<std::optional<BatchFailure>> failures(requests.size());
  for_each_bounded(requests.size(), std::min(concurrency, limit), [&](std::size_t i) {
    try {
      outcome.results[i] = generate(requests[i], backend);
    } catch (const Error& e) {
      failures[i] = BatchFailure{i, requests[i].sample_id, e.code(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = BatchFailure{i, requests[i].sample_id, ErrorCode::kTransport, e.what()};
    }
  });
  for (auto& f : failures) {
    if (f) outcome.failures.push_back(std::move(*f));
  }
  return outcome;
}

}  // namespace naicl
