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

// Local HTTP server standing in for LLM and TTS providers.

#pragma once

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

namespace accentkit::testing {

class MockServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit MockServer(Handler handler, std::chrono::milliseconds latency = {})
      : handler_(std::move(handler)), latency_(latency) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(64); };
    auto wrapped = [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      int now = ++in_flight_;
      int prev = max_in_flight_.load();
      while (now > prev && !max_in_flight_.compare_exchange_weak(prev, now)) {
      }
      if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
      {
        std::lock_guard<std::mutex> lock(mu_);
        last_body_ = req.body;
        last_auth_ = req.get_header_value("Authorization");
      }
      handler_(req, res);
      --in_flight_;
    };
    server_.Post(".*", wrapped);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int calls() const { return calls_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }
  std::string last_body() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_body_;
  }
  std::string last_auth() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_auth_;
  }

 private:
  Handler handler_;
  std::chrono::milliseconds latency_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  mutable std::mutex mu_;
  std::string last_body_;
  std::string last_auth_;
};

// OpenAI-style chat completion body wrapping `content`.
inline std::string chat_reply(const std::string& content) {
  nlohmann::json j = {
      {"choices", nlohmann::json::array(
                      {{{"index", 0},
                        {"message", {{"role", "assistant"}, {"content", content}}}}})}};
  return j.dump();
}

}  // namespace accentkit::testing
