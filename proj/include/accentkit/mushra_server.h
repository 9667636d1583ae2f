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

// HTTP front end for MUSHRA sessions.
//
//   GET  /api/session/{id}/next-trial?evaluator=E
//   GET  /api/stimulus/{handle}
//   POST /api/rating      {session_id, evaluator_id, trial_id, scores: {handle: 0..100}}
//   GET  /api/stats/{id}
//
// Errors come back as {"error": <category>, "message": ...}.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "accentkit/mushra.h"

namespace httplib {
class Server;
}

namespace accentkit::mushra {

class Server {
 public:
  // Each directory holds one session. `ui_dir`, when set, is served at /.
  explicit Server(const std::vector<std::filesystem::path>& session_dirs,
                  std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~Server();

  Session& session(const std::string& id);

  // Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  void routes();

  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::map<std::string, Session*> by_handle_;
  std::optional<std::filesystem::path> ui_dir_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace accentkit::mushra
