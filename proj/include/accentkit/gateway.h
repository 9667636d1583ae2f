// Copyright 2026 The accentkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP clients for an LLM chat endpoint and a TTS endpoint, fronted by a
// content-addressed replay store.
//
// Store layout under cache_root:
//   llm/<digest>.json   request fields plus "response"
//   tts/<digest>.wav    16 kHz mono PCM16
//   tts/<digest>.json   metadata sidecar

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace accentkit::gateway {

enum class Mode {
  kLive,        // read-through cache, network on miss
  kReplayOnly,  // cache only, miss is an error
};

// kLive iff ACCENTKIT_LIVE=1.
Mode mode_from_env();

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{250};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};

  std::chrono::milliseconds delay_for(int attempt) const;
};

struct EndpointConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path;
  std::string api_key;
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  int max_in_flight = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
};

// Reads LLM_BASE_URL / LLM_API_KEY.
EndpointConfig llm_endpoint_from_env();
// Reads TTS_BASE_URL / TTS_API_KEY.
EndpointConfig tts_endpoint_from_env();

struct Stats {
  int network_calls = 0;  // HTTP attempts, including retries
  int cache_hits = 0;
  int cache_writes = 0;
};

// Bounded in-flight limiter, shared by one backend's calls.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit);
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }
  int limit() const { return limit_; }

 private:
  int limit_;
  std::counting_semaphore<1024> sem_;
};

// Serializes work per key while letting distinct keys proceed in parallel.
class KeyedMutex {
 public:
  std::shared_ptr<std::mutex> get(const std::string& key);

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> locks_;
};

struct HttpReply {
  int status = 0;  // 0 = connection failure
  std::string body;
  std::string content_type;
};

// POSTs with retries; throws kAuth, kRateLimited or kNetwork.
class HttpPoster {
 public:
  explicit HttpPoster(EndpointConfig cfg);

  HttpReply post_json(const std::string& body, std::atomic<int>& calls);
  HttpReply post_multipart(
      const std::vector<std::pair<std::string, std::string>>& fields,
      const std::vector<std::pair<std::string, std::string>>& files,
      std::atomic<int>& calls);

  const EndpointConfig& config() const { return cfg_; }

 private:
  template <typename Send>
  HttpReply with_retries(Send send, std::atomic<int>& calls);

  EndpointConfig cfg_;
  InFlightLimiter limiter_;
};

// ---------------------------------------------------------------- LLM

struct LlmRequest {
  std::string model_id;
  std::string prompt;
  nlohmann::json params = nlohmann::json::object();
  int run_index = 0;

  std::string digest() const;
};

class LlmService {
 public:
  virtual ~LlmService() = default;
  virtual std::string complete(const LlmRequest& req) = 0;
};

struct LlmConfig {
  Mode mode = Mode::kReplayOnly;
  std::filesystem::path cache_root = "cache";
  EndpointConfig endpoint;
  std::string response_pointer = "/choices/0/message/content";
};

class LlmGateway : public LlmService {
 public:
  explicit LlmGateway(LlmConfig cfg);

  std::string complete(const LlmRequest& req) override;

  // Seeds the store, e.g. from a recorded fixture.
  void put(const LlmRequest& req, const std::string& response);
  bool cached(const LlmRequest& req) const;

  Stats stats() const;
  const LlmConfig& config() const { return cfg_; }

 private:
  std::filesystem::path path_for(const std::string& digest) const;

  LlmConfig cfg_;
  HttpPoster poster_;
  KeyedMutex locks_;
  std::atomic<int> network_calls_{0};
  std::atomic<int> cache_hits_{0};
  std::atomic<int> cache_writes_{0};
};

// ---------------------------------------------------------------- TTS

// No language field: the language is carried by the text's script.
struct TtsRequest {
  std::string text;
  std::vector<std::string> speaker_prompt;  // asset ids under asset_root
  nlohmann::json params = nlohmann::json::object();
};

struct TtsMetadata {
  std::string digest;
  std::string provider;
  double duration_seconds = 0.0;
  int sample_rate = 0;
  std::vector<std::string> speaker_prompt;
  std::filesystem::path path;

  nlohmann::json to_json() const;
  static TtsMetadata from_json(const nlohmann::json& j);
};

struct TtsResult {
  std::string wav;
  TtsMetadata meta;
};

class TtsService {
 public:
  virtual ~TtsService() = default;
  virtual TtsResult synthesize(const TtsRequest& req) = 0;
};

struct TtsConfig {
  Mode mode = Mode::kReplayOnly;
  std::filesystem::path cache_root = "cache";
  std::filesystem::path asset_root = ".";
  std::string provider = "tts";
  EndpointConfig endpoint;
};

// All *.wav clips under asset_root/speakers/<speaker_id>/, as asset ids,
// sorted. Throws kNotFound when there are none.
std::vector<std::string> speaker_clips(const std::filesystem::path& asset_root,
                                       const std::string& speaker_id);

class TtsGateway : public TtsService {
 public:
  explicit TtsGateway(TtsConfig cfg);

  TtsResult synthesize(const TtsRequest& req) override;
  std::string digest(const TtsRequest& req) const;

  Stats stats() const;
  const TtsConfig& config() const { return cfg_; }

 private:
  TtsConfig cfg_;
  HttpPoster poster_;
  KeyedMutex locks_;
  std::atomic<int> network_calls_{0};
  std::atomic<int> cache_hits_{0};
  std::atomic<int> cache_writes_{0};
};

// Writes via a temp file and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace accentkit::gateway
