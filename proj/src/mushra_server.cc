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

#include "accentkit/mushra_server.h"

#include <httplib.h>

#include <json.hpp>

#include "accentkit/error.h"
#include "accentkit/gateway.h"

namespace accentkit::mushra {
namespace {

using nlohmann::json;

int status_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kInvalidArgument:
    case ErrorCategory::kParse:
      return 400;
    case ErrorCategory::kNotFound:
      return 404;
    default:
      return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header("Cache-Control", "no-store");
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, status_for(e.category()),
                {{"error", category_name(e.category())}, {"message", e.what()}});
    } catch (const json::exception& e) {
      send_json(res, 400, {{"error", "parse"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

Server::Server(const std::vector<std::filesystem::path>& session_dirs,
               std::optional<std::filesystem::path> ui_dir)
    : ui_dir_(std::move(ui_dir)), http_(std::make_unique<httplib::Server>()) {
  for (const auto& dir : session_dirs) {
    auto s = Session::open(dir);
    const std::string id = s->config().session_id;
    if (sessions_.count(id)) {
      throw Error(ErrorCategory::kInvalidArgument, "session loaded twice: " + id);
    }
    for (const auto& st : s->stimuli()) by_handle_[st.handle] = s.get();
    sessions_[id] = std::move(s);
  }
  routes();
}

Server::~Server() { stop(); }

Session& Server::session(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCategory::kNotFound, "unknown session: " + id);
  return *it->second;
}

void Server::routes() {
  http_->Get(R"(/api/session/([^/]+)/next-trial)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               Session& s = session(req.matches[1]);
               const std::string evaluator = req.get_param_value("evaluator");
               auto view = s.next_trial(evaluator);
               if (!view) {
                 send_json(res, 200,
                           {{"session_id", s.config().session_id},
                            {"done", true},
                            {"total", s.config().trials.size()}});
                 return;
               }
               send_json(res, 200, view->to_json());
             }));

  http_->Get(R"(/api/stimulus/([0-9a-f]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string handle = req.matches[1];
               auto it = by_handle_.find(handle);
               if (it == by_handle_.end()) {
                 throw Error(ErrorCategory::kNotFound, "unknown stimulus");
               }
               const Stimulus* st = it->second->find_stimulus(handle);
               res.set_header("Cache-Control", "no-store");
               res.set_content(gateway::read_file(st->path), "audio/wav");
             }));

  http_->Post("/api/rating", guarded([this](const httplib::Request& req, httplib::Response& res) {
                const json body = json::parse(req.body);
                Session& s = session(body.at("session_id").get<std::string>());
                std::map<std::string, int> scores;
                for (const auto& [handle, v] : body.at("scores").items()) {
                  if (!v.is_number_integer()) {
                    throw Error(ErrorCategory::kInvalidArgument, "scores must be integers");
                  }
                  const auto n = v.get<std::int64_t>();
                  if (n < 0 || n > 100) {
                    throw Error(ErrorCategory::kInvalidArgument, "score out of [0,100]");
                  }
                  scores[handle] = static_cast<int>(n);
                }
                auto r = s.submit_blinded(body.at("evaluator_id").get<std::string>(),
                                          body.at("trial_id").get<std::string>(), scores);
                send_json(res, 200, {{"status", "ok"}, {"replaced", r.replaced}});
              }));

  http_->Get(R"(/api/stats/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               Session& s = session(req.matches[1]);
               json rows = json::array();
               for (const auto& st : s.stats()) {
                 rows.push_back({{"condition", st.condition},
                                 {"n", st.n},
                                 {"mean", st.mean},
                                 {"ci_half_width", st.ci_half_width},
                                 {"rendered", st.rendered()}});
               }
               send_json(res, 200,
                         {{"session_id", s.config().session_id},
                          {"axis", axis_name(s.config().axis)},
                          {"group", s.config().group},
                          {"responses", s.responses().size()},
                          {"conditions", rows}});
             }));

  if (ui_dir_) http_->set_mount_point("/", ui_dir_->string());
}

int Server::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = http_->bind_to_any_port(host);
  } else if (!http_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCategory::kNetwork, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return bound;
}

void Server::run(const std::string& host, int port) {
  if (!http_->listen(host, port)) {
    throw Error(ErrorCategory::kNetwork, "cannot serve on " + host + ":" + std::to_string(port));
  }
}

void Server::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace accentkit::mushra
