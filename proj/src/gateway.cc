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

#include "accentkit/gateway.h"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "accentkit/digest.h"
#include "accentkit/error.h"
#include "accentkit/wav.h"

namespace accentkit::gateway {
namespace fs = std::filesystem;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

bool transient(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

Mode mode_from_env() {
  return env_or("ACCENTKIT_LIVE", "") == "1" ? Mode::kLive : Mode::kReplayOnly;
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
  double ms = static_cast<double>(base_delay.count()) * std::pow(multiplier, attempt);
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long>(ms));
}

EndpointConfig llm_endpoint_from_env() {
  EndpointConfig cfg;
  cfg.base_url = env_or("LLM_BASE_URL", "https://api.openai.com");
  cfg.path = "/v1/chat/completions";
  cfg.api_key = env_or("LLM_API_KEY", "");
  return cfg;
}

EndpointConfig tts_endpoint_from_env() {
  EndpointConfig cfg;
  cfg.base_url = env_or("TTS_BASE_URL", "");
  cfg.path = "/v1/tts";
  cfg.api_key = env_or("TTS_API_KEY", "");
  return cfg;
}

InFlightLimiter::InFlightLimiter(int limit)
    : limit_(limit), sem_(std::clamp(limit, 1, 1024)) {
  if (limit < 1 || limit > 1024) {
    throw Error(ErrorCategory::kInvalidArgument,
                "max_in_flight must be in [1, 1024]");
  }
}

std::shared_ptr<std::mutex> KeyedMutex::get(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = locks_[key];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  fs::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCategory::kIo, "short write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- HTTP

HttpPoster::HttpPoster(EndpointConfig cfg)
    : cfg_(std::move(cfg)), limiter_(cfg_.max_in_flight) {}

template <typename Send>
HttpReply HttpPoster::with_retries(Send send, std::atomic<int>& calls) {
  if (cfg_.base_url.empty()) {
    throw Error(ErrorCategory::kNetwork, "no base URL configured");
  }
  HttpReply last;
  std::string last_error;
  const int attempts = std::max(1, cfg_.retry.max_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.retry.delay_for(attempt - 1));
    // A fresh client per attempt; httplib serializes requests on one client.
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) {
      headers.emplace(cfg_.auth_header, cfg_.auth_prefix + cfg_.api_key);
    }
    limiter_.acquire();
    ++calls;
    httplib::Result res = send(client, headers);
    limiter_.release();

    last = HttpReply{};
    if (res) {
      last.status = res->status;
      last.body = res->body;
      last.content_type = res->get_header_value("Content-Type");
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (last.status >= 200 && last.status < 300) return last;
    if (last.status == 401 || last.status == 403) {
      throw Error(ErrorCategory::kAuth,
                  "authentication failed (HTTP " + std::to_string(last.status) + ")");
    }
    if (!transient(last.status)) {
      throw Error(ErrorCategory::kNetwork,
                  "HTTP " + std::to_string(last.status) + ": " + last.body.substr(0, 200));
    }
  }
  if (last.status == 429) {
    throw Error(ErrorCategory::kRateLimited,
                "rate limited after " + std::to_string(attempts) + " attempts");
  }
  throw Error(ErrorCategory::kNetwork,
              "gave up after " + std::to_string(attempts) + " attempts: " +
                  (last.status ? "HTTP " + std::to_string(last.status) : last_error));
}

HttpReply HttpPoster::post_json(const std::string& body, std::atomic<int>& calls) {
  return with_retries(
      [&](httplib::Client& c, const httplib::Headers& h) {
        return c.Post(cfg_.path, h, body, "application/json");
      },
      calls);
}

HttpReply HttpPoster::post_multipart(
    const std::vector<std::pair<std::string, std::string>>& fields,
    const std::vector<std::pair<std::string, std::string>>& files,
    std::atomic<int>& calls) {
  httplib::MultipartFormDataItems items;
  for (const auto& [name, value] : fields) items.push_back({name, value, "", "text/plain"});
  for (const auto& [name, bytes] : files) {
    items.push_back({name, bytes, name + ".wav", "audio/wav"});
  }
  return with_retries(
      [&](httplib::Client& c, const httplib::Headers& h) {
        return c.Post(cfg_.path, h, items);
      },
      calls);
}

// ---------------------------------------------------------------- LLM

std::string LlmRequest::digest() const {
  return DigestBuilder()
      .add("kind", "llm")
      .add("model", model_id)
      .add("prompt", prompt)
      .add("params", params.dump())
      .add("run", static_cast<std::int64_t>(run_index))
      .hex();
}

LlmGateway::LlmGateway(LlmConfig cfg) : cfg_(std::move(cfg)), poster_(cfg_.endpoint) {}

fs::path LlmGateway::path_for(const std::string& digest) const {
  return cfg_.cache_root / "llm" / (digest + ".json");
}

bool LlmGateway::cached(const LlmRequest& req) const {
  return fs::exists(path_for(req.digest()));
}

void LlmGateway::put(const LlmRequest& req, const std::string& response) {
  nlohmann::json rec = {{"digest", req.digest()},
                        {"model_id", req.model_id},
                        {"run_index", req.run_index},
                        {"params", req.params},
                        {"prompt", req.prompt},
                        {"response", response}};
  write_file_atomic(path_for(req.digest()), rec.dump(2) + "\n");
  ++cache_writes_;
}

std::string LlmGateway::complete(const LlmRequest& req) {
  const std::string digest = req.digest();
  auto mu = locks_.get(digest);
  std::lock_guard<std::mutex> lock(*mu);

  const fs::path path = path_for(digest);
  if (fs::exists(path)) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kIntegrity, "corrupt cache entry " + path.string());
    }
    ++cache_hits_;
    return rec.at("response").get<std::string>();
  }
  if (cfg_.mode == Mode::kReplayOnly) {
    throw Error(ErrorCategory::kReplayMiss,
                "no recorded response for digest " + digest + " (model " +
                    req.model_id + ", run " + std::to_string(req.run_index) + ")");
  }

  nlohmann::json body = req.params.is_object() ? req.params : nlohmann::json::object();
  body["model"] = req.model_id;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}});
  HttpReply reply = poster_.post_json(body.dump(), network_calls_);

  std::string text;
  try {
    auto j = nlohmann::json::parse(reply.body);
    text = j.at(nlohmann::json::json_pointer(cfg_.response_pointer)).get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kNetwork,
                std::string("unexpected LLM response shape: ") + e.what());
  }
  put(req, text);
  return text;
}

Stats LlmGateway::stats() const {
  return Stats{network_calls_.load(), cache_hits_.load(), cache_writes_.load()};
}

// ---------------------------------------------------------------- TTS

nlohmann::json TtsMetadata::to_json() const {
  return {{"digest", digest},
          {"provider", provider},
          {"duration_seconds", duration_seconds},
          {"sample_rate", sample_rate},
          {"speaker_prompt", speaker_prompt},
          {"path", path.generic_string()}};
}

TtsMetadata TtsMetadata::from_json(const nlohmann::json& j) {
  TtsMetadata m;
  m.digest = j.at("digest").get<std::string>();
  m.provider = j.at("provider").get<std::string>();
  m.duration_seconds = j.at("duration_seconds").get<double>();
  m.sample_rate = j.at("sample_rate").get<int>();
  m.speaker_prompt = j.at("speaker_prompt").get<std::vector<std::string>>();
  m.path = j.at("path").get<std::string>();
  return m;
}

std::vector<std::string> speaker_clips(const fs::path& asset_root,
                                       const std::string& speaker_id) {
  const fs::path dir = asset_root / "speakers" / speaker_id;
  std::vector<std::string> ids;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") {
        ids.push_back(("speakers" / fs::path(speaker_id) / e.path().filename())
                          .generic_string());
      }
    }
  }
  if (ids.empty()) {
    throw Error(ErrorCategory::kNotFound, "no reference clips for speaker '" +
                                              speaker_id + "' under " + dir.string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

TtsGateway::TtsGateway(TtsConfig cfg) : cfg_(std::move(cfg)), poster_(cfg_.endpoint) {}

std::string TtsGateway::digest(const TtsRequest& req) const {
  DigestBuilder d;
  d.add("kind", "tts").add("provider", cfg_.provider).add("text", req.text);
  for (const auto& id : req.speaker_prompt) {
    const fs::path p = cfg_.asset_root / id;
    if (!fs::is_regular_file(p)) {
      throw Error(ErrorCategory::kNotFound, "speaker asset not found: " + id);
    }
    d.add("speaker", id).add("speaker_sha256", sha256_hex(read_file(p)));
  }
  d.add("params", req.params.dump());
  return d.hex();
}

TtsResult TtsGateway::synthesize(const TtsRequest& req) {
  if (req.text.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "TTS text must be non-empty");
  }
  if (req.speaker_prompt.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "TTS speaker prompt is empty");
  }
  const std::string d = digest(req);
  auto mu = locks_.get(d);
  std::lock_guard<std::mutex> lock(*mu);

  const fs::path wav_path = cfg_.cache_root / "tts" / (d + ".wav");
  const fs::path meta_path = cfg_.cache_root / "tts" / (d + ".json");
  if (fs::exists(wav_path) && fs::exists(meta_path)) {
    ++cache_hits_;
    TtsResult r;
    r.wav = read_file(wav_path);
    r.meta = TtsMetadata::from_json(nlohmann::json::parse(read_file(meta_path)));
    r.meta.path = wav_path;
    return r;
  }
  if (cfg_.mode == Mode::kReplayOnly) {
    throw Error(ErrorCategory::kReplayMiss, "no recorded audio for digest " + d);
  }

  std::vector<std::pair<std::string, std::string>> fields = {
      {"text", req.text}, {"params", req.params.dump()}};
  std::vector<std::pair<std::string, std::string>> files;
  for (size_t i = 0; i < req.speaker_prompt.size(); ++i) {
    files.emplace_back("speaker_" + std::to_string(i),
                       read_file(cfg_.asset_root / req.speaker_prompt[i]));
  }
  HttpReply reply = poster_.post_multipart(fields, files, network_calls_);
  if (reply.body.empty()) {
    throw Error(ErrorCategory::kNetwork, "provider returned empty audio");
  }
  wav::PcmAudio audio = wav::to_corpus_format(wav::decode(reply.body));
  if (audio.samples.empty()) {
    throw Error(ErrorCategory::kNetwork, "provider returned empty audio");
  }

  TtsResult r;
  r.wav = wav::encode(audio);
  r.meta.digest = d;
  r.meta.provider = cfg_.provider;
  r.meta.duration_seconds = audio.duration_seconds();
  r.meta.sample_rate = audio.sample_rate;
  r.meta.speaker_prompt = req.speaker_prompt;
  r.meta.path = wav_path;
  write_file_atomic(wav_path, r.wav);
  write_file_atomic(meta_path, r.meta.to_json().dump(2) + "\n");
  ++cache_writes_;
  return r;
}

Stats TtsGateway::stats() const {
  return Stats{network_calls_.load(), cache_hits_.load(), cache_writes_.load()};
}

}  // namespace accentkit::gateway
