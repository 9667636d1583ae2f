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

// MUSHRA listening-test backend: sessions, blinded trials, response log and
// mean +/- 95% CI statistics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace accentkit::mushra {

enum class Axis { kNaturalness, kAccentedness };
std::string_view axis_name(Axis a);
Axis parse_axis(std::string_view s);
std::string_view instruction(Axis a);

struct Trial {
  std::string trial_id;
  std::map<std::string, std::string> stimuli;  // condition id -> audio path
};

struct SessionConfig {
  std::string session_id;
  Axis axis = Axis::kNaturalness;
  std::string group;  // evaluator group label
  std::vector<std::string> conditions;
  std::vector<Trial> trials;
  std::uint64_t seed = 0;
  std::optional<std::string> reference;  // condition also offered as a labeled reference

  nlohmann::json to_json() const;
  // Relative stimulus paths resolve against `base_dir`.
  static SessionConfig from_json(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir = {});
};

struct Stimulus {
  std::string handle;
  std::string trial_id;
  std::string condition;
  std::filesystem::path path;
};

// Evaluator-facing trial; carries opaque handles only.
struct TrialView {
  std::string session_id;
  std::string trial_id;
  std::size_t index = 0;
  std::size_t total = 0;
  Axis axis = Axis::kNaturalness;
  std::vector<std::string> handles;
  std::optional<std::string> reference_handle;

  nlohmann::json to_json() const;
};

struct MushraResponse {
  std::string session_id;
  std::string evaluator_id;
  std::string trial_id;
  std::map<std::string, int> scores;  // condition id -> 0..100
  std::string timestamp;

  nlohmann::json to_json() const;
  static MushraResponse from_json(const nlohmann::json& j);
  bool operator==(const MushraResponse&) const = default;
};

// ---------------------------------------------------------------- stats

struct MushraStats {
  std::string condition;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci_half_width = 0.0;

  std::string rendered() const;  // "MM.MM ± H.HH"
};

// Two-sided 95% t-interval over individual scores; n >= 2.
MushraStats compute_stats(std::span<const double> scores);
MushraStats compute_stats(const std::vector<MushraResponse>& responses,
                          const std::string& condition);
std::string render_mean_ci(double mean, double half_width);

// ---------------------------------------------------------------- session

// One session on disk: <root>/session.json, responses.jsonl, snapshot.json.
class Session {
 public:
  static std::unique_ptr<Session> create(const SessionConfig& cfg,
                                         const std::filesystem::path& dir);
  static std::unique_ptr<Session> open(const std::filesystem::path& dir);

  const SessionConfig& config() const { return cfg_; }
  const std::vector<Stimulus>& stimuli() const { return stimuli_; }
  const Stimulus* find_stimulus(const std::string& handle) const;

  // Seeded by (session seed, evaluator).
  std::vector<std::size_t> trial_order(const std::string& evaluator) const;
  std::vector<std::string> stimulus_order(const std::string& evaluator,
                                          const std::string& trial_id) const;

  // Next unanswered trial for the evaluator, or nullopt when done.
  std::optional<TrialView> next_trial(const std::string& evaluator) const;

  struct SubmitResult {
    bool replaced = false;
  };
  // Scores keyed by condition id.
  SubmitResult submit(MushraResponse resp);
  // Scores keyed by stimulus handle, as posted by the evaluator UI.
  SubmitResult submit_blinded(const std::string& evaluator, const std::string& trial_id,
                              const std::map<std::string, int>& handle_scores);

  std::vector<MushraResponse> responses() const;
  std::vector<MushraStats> stats() const;  // one row per condition with n >= 2
  std::string report() const;

  void set_log(std::function<void(const std::string&)> log) { log_ = std::move(log); }
  void snapshot();

  static constexpr std::size_t kSnapshotEvery = 64;

 private:
  Session(SessionConfig cfg, std::filesystem::path dir);
  void build_stimuli();
  void replay();
  void write_snapshot();
  const Trial* find_trial(const std::string& trial_id) const;
  void validate(const MushraResponse& r) const;

  SessionConfig cfg_;
  std::filesystem::path dir_;
  std::vector<Stimulus> stimuli_;
  std::map<std::string, std::size_t> by_handle_;

  mutable std::shared_mutex mu_;
  std::mutex write_mu_;
  std::map<std::pair<std::string, std::string>, MushraResponse> responses_;
  std::size_t log_lines_ = 0;
  std::size_t since_snapshot_ = 0;
  std::function<void(const std::string&)> log_;
};

std::string now_iso8601();

}  // namespace accentkit::mushra
