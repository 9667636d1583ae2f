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

#include "accentkit/mushra.h"

#include <boost/math/distributions/students_t.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "accentkit/corpus.h"
#include "accentkit/digest.h"
#include "accentkit/error.h"
#include "accentkit/gateway.h"
#include "accentkit/text.h"

namespace accentkit::mushra {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void invalid(const std::string& msg) { throw Error(ErrorCategory::kInvalidArgument, msg); }

bool safe_id(const std::string& s) {
  if (s.empty() || s.size() > 128 || s[0] == '.') return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      return false;
    }
  }
  return true;
}

std::uint64_t derived_seed(std::initializer_list<std::pair<std::string_view, std::string>> parts) {
  DigestBuilder b;
  for (const auto& [tag, v] : parts) b.add(tag, v);
  return std::stoull(b.hex().substr(0, 16), nullptr, 16);
}

int score_from_json(const json& v, const std::string& key) {
  if (!v.is_number_integer()) invalid("score for " + key + " must be an integer");
  const auto s = v.get<std::int64_t>();
  if (s < 0 || s > 100) invalid("score for " + key + " out of [0,100]: " + std::to_string(s));
  return static_cast<int>(s);
}

}  // namespace

std::string_view axis_name(Axis a) {
  return a == Axis::kNaturalness ? "naturalness" : "accentedness";
}

Axis parse_axis(std::string_view s) {
  if (s == "naturalness") return Axis::kNaturalness;
  if (s == "accentedness") return Axis::kAccentedness;
  invalid("unknown axis: " + std::string(s));
  return Axis::kNaturalness;
}

std::string_view instruction(Axis a) {
  if (a == Axis::kNaturalness) {
    return "Rate how natural each sample sounds, as if produced by a human talker. "
           "Ignore the accent and any background noise.";
  }
  return "Rate how strong the accent is in each sample. 0 means no audible accent, "
         "100 means a very strong accent.";
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- json

json SessionConfig::to_json() const {
  json trials_j = json::array();
  for (const auto& t : trials) trials_j.push_back({{"id", t.trial_id}, {"stimuli", t.stimuli}});
  json j{{"session_id", session_id}, {"axis", axis_name(axis)},  {"group", group},
         {"conditions", conditions}, {"trials", trials_j},       {"seed", seed}};
  if (reference) j["reference"] = *reference;
  return j;
}

SessionConfig SessionConfig::from_json(const json& j, const fs::path& base_dir) {
  try {
    SessionConfig c;
    c.session_id = j.at("session_id").get<std::string>();
    c.axis = parse_axis(j.value("axis", "naturalness"));
    c.group = j.value("group", "");
    c.conditions = j.at("conditions").get<std::vector<std::string>>();
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("reference")) c.reference = j["reference"].get<std::string>();
    for (const auto& t : j.at("trials")) {
      Trial tr;
      tr.trial_id = t.at("id").get<std::string>();
      for (const auto& [cond, p] : t.at("stimuli").items()) {
        fs::path path = p.get<std::string>();
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        tr.stimuli[cond] = path.lexically_normal().string();
      }
      c.trials.push_back(std::move(tr));
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, std::string("session config: ") + e.what());
  }
}

json TrialView::to_json() const {
  json j{{"session_id", session_id}, {"trial_id", trial_id},  {"index", index},
         {"total", total},           {"axis", axis_name(axis)}, {"instruction", instruction(axis)},
         {"done", false}};
  json stim = json::array();
  for (const auto& h : handles) stim.push_back({{"handle", h}, {"url", "/api/stimulus/" + h}});
  j["stimuli"] = stim;
  if (reference_handle) {
    j["reference"] = {{"handle", *reference_handle}, {"url", "/api/stimulus/" + *reference_handle}};
  }
  return j;
}

json MushraResponse::to_json() const {
  return {{"session_id", session_id}, {"evaluator_id", evaluator_id}, {"trial_id", trial_id},
          {"scores", scores},         {"timestamp", timestamp}};
}

MushraResponse MushraResponse::from_json(const json& j) {
  try {
    MushraResponse r;
    r.session_id = j.at("session_id").get<std::string>();
    r.evaluator_id = j.at("evaluator_id").get<std::string>();
    r.trial_id = j.at("trial_id").get<std::string>();
    for (const auto& [k, v] : j.at("scores").items()) r.scores[k] = score_from_json(v, k);
    r.timestamp = j.value("timestamp", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, std::string("response: ") + e.what());
  }
}

// ---------------------------------------------------------------- stats

std::string render_mean_ci(double mean, double half_width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, half_width);
  return buf;
}

std::string MushraStats::rendered() const { return render_mean_ci(mean, ci_half_width); }

MushraStats compute_stats(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n < 2) invalid("confidence interval needs at least 2 scores, got " + std::to_string(n));
  double sum = 0.0;
  for (double s : scores) sum += s;
  MushraStats st;
  st.n = n;
  st.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) ss += (s - st.mean) * (s - st.mean);
  st.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  st.ci_half_width = t * st.stddev / std::sqrt(static_cast<double>(n));
  return st;
}

MushraStats compute_stats(const std::vector<MushraResponse>& responses,
                          const std::string& condition) {
  std::vector<double> scores;
  for (const auto& r : responses) {
    if (auto it = r.scores.find(condition); it != r.scores.end()) scores.push_back(it->second);
  }
  MushraStats st = compute_stats(scores);
  st.condition = condition;
  return st;
}

// ---------------------------------------------------------------- session

Session::Session(SessionConfig cfg, fs::path dir) : cfg_(std::move(cfg)), dir_(std::move(dir)) {
  log_ = [](const std::string& msg) { std::fprintf(stderr, "mushra: %s\n", msg.c_str()); };
}

void Session::build_stimuli() {
  for (const auto& t : cfg_.trials) {
    for (const auto& cond : cfg_.conditions) {
      Stimulus s;
      s.trial_id = t.trial_id;
      s.condition = cond;
      s.path = t.stimuli.at(cond);
      s.handle = DigestBuilder()
                     .add("kind", "mushra-stimulus")
                     .add("session", cfg_.session_id)
                     .add("seed", static_cast<std::int64_t>(cfg_.seed))
                     .add("trial", t.trial_id)
                     .add("condition", cond)
                     .hex()
                     .substr(0, 24);
      by_handle_[s.handle] = stimuli_.size();
      stimuli_.push_back(std::move(s));
    }
  }
}

std::unique_ptr<Session> Session::create(const SessionConfig& cfg, const fs::path& dir) {
  if (!safe_id(cfg.session_id)) invalid("invalid session id: '" + cfg.session_id + "'");
  if (cfg.conditions.size() < 2) invalid("a session needs at least 2 conditions");
  std::set<std::string> conds;
  for (const auto& c : cfg.conditions) {
    if (c.empty()) invalid("empty condition id");
    if (!conds.insert(c).second) invalid("duplicate condition id: " + c);
  }
  if (cfg.reference && !conds.count(*cfg.reference)) {
    invalid("reference is not a condition: " + *cfg.reference);
  }
  if (cfg.trials.empty()) invalid("a session needs at least 1 trial");
  std::set<std::string> trial_ids;
  for (const auto& t : cfg.trials) {
    if (t.trial_id.empty()) invalid("empty trial id");
    if (!trial_ids.insert(t.trial_id).second) invalid("duplicate trial id: " + t.trial_id);
    for (const auto& c : cfg.conditions) {
      auto it = t.stimuli.find(c);
      if (it == t.stimuli.end()) {
        throw Error(ErrorCategory::kNotFound,
                    "missing stimulus: trial " + t.trial_id + " condition " + c);
      }
      if (!fs::is_regular_file(it->second)) {
        throw Error(ErrorCategory::kNotFound, "missing stimulus: " + it->second);
      }
    }
    for (const auto& [c, _] : t.stimuli) {
      if (!conds.count(c)) invalid("trial " + t.trial_id + " has unknown condition " + c);
    }
  }
  if (fs::exists(dir / "session.json")) invalid("session already exists: " + dir.string());
  fs::create_directories(dir);
  SessionConfig stored = cfg;
  for (auto& t : stored.trials) {
    for (auto& [c, p] : t.stimuli) p = fs::absolute(p).lexically_normal().string();
  }
  gateway::write_file_atomic(dir / "session.json", stored.to_json().dump(2) + "\n");
  std::unique_ptr<Session> s(new Session(std::move(stored), dir));
  s->build_stimuli();
  return s;
}

std::unique_ptr<Session> Session::open(const fs::path& dir) {
  const fs::path file = dir / "session.json";
  if (!fs::exists(file)) throw Error(ErrorCategory::kNotFound, "no session at " + dir.string());
  json j;
  try {
    j = json::parse(gateway::read_file(file));
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, file.string() + ": " + e.what());
  }
  std::unique_ptr<Session> s(new Session(SessionConfig::from_json(j), dir));
  s->build_stimuli();
  s->replay();
  return s;
}

void Session::replay() {
  std::size_t skip = 0;
  if (fs::exists(dir_ / "snapshot.json")) {
    try {
      json snap = json::parse(gateway::read_file(dir_ / "snapshot.json"));
      skip = snap.at("lines").get<std::size_t>();
      for (const auto& rj : snap.at("responses")) {
        auto r = MushraResponse::from_json(rj);
        responses_[{r.evaluator_id, r.trial_id}] = r;
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCategory::kIntegrity, std::string("snapshot: ") + e.what());
    }
  }
  std::ifstream in(dir_ / "responses.jsonl");
  if (!in) {
    log_lines_ = skip;
    return;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < skip) {
    throw Error(ErrorCategory::kIntegrity, "response log shorter than its snapshot");
  }
  for (std::size_t i = skip; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      auto r = MushraResponse::from_json(json::parse(lines[i]));
      responses_[{r.evaluator_id, r.trial_id}] = std::move(r);
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) {
        log_("ignoring torn final log line " + std::to_string(i + 1));
        continue;
      }
      throw Error(ErrorCategory::kIntegrity,
                  "response log line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  log_lines_ = lines.size();
}

const Stimulus* Session::find_stimulus(const std::string& handle) const {
  auto it = by_handle_.find(handle);
  return it == by_handle_.end() ? nullptr : &stimuli_[it->second];
}

const Trial* Session::find_trial(const std::string& trial_id) const {
  for (const auto& t : cfg_.trials) {
    if (t.trial_id == trial_id) return &t;
  }
  return nullptr;
}

std::vector<std::size_t> Session::trial_order(const std::string& evaluator) const {
  return corpus::seeded_permutation(
      cfg_.trials.size(),
      derived_seed({{"session", cfg_.session_id},
                    {"seed", std::to_string(cfg_.seed)},
                    {"evaluator", evaluator}}));
}

std::vector<std::string> Session::stimulus_order(const std::string& evaluator,
                                                 const std::string& trial_id) const {
  if (!find_trial(trial_id)) throw Error(ErrorCategory::kNotFound, "unknown trial: " + trial_id);
  auto perm = corpus::seeded_permutation(
      cfg_.conditions.size(),
      derived_seed({{"session", cfg_.session_id},
                    {"seed", std::to_string(cfg_.seed)},
                    {"evaluator", evaluator},
                    {"trial", trial_id}}));
  std::vector<std::string> handles;
  for (std::size_t idx : perm) {
    for (const auto& s : stimuli_) {
      if (s.trial_id == trial_id && s.condition == cfg_.conditions[idx]) handles.push_back(s.handle);
    }
  }
  return handles;
}

std::optional<TrialView> Session::next_trial(const std::string& evaluator) const {
  if (evaluator.empty()) invalid("evaluator id required");
  const auto order = trial_order(evaluator);
  std::shared_lock lock(mu_);
  std::size_t answered = 0;
  const Trial* next = nullptr;
  for (std::size_t idx : order) {
    const auto& t = cfg_.trials[idx];
    if (responses_.count({evaluator, t.trial_id})) {
      ++answered;
    } else if (!next) {
      next = &t;
    }
  }
  if (!next) return std::nullopt;
  TrialView v;
  v.session_id = cfg_.session_id;
  v.trial_id = next->trial_id;
  v.index = answered;
  v.total = cfg_.trials.size();
  v.axis = cfg_.axis;
  v.handles = stimulus_order(evaluator, next->trial_id);
  if (cfg_.reference) {
    for (const auto& s : stimuli_) {
      if (s.trial_id == next->trial_id && s.condition == *cfg_.reference) v.reference_handle = s.handle;
    }
  }
  return v;
}

void Session::validate(const MushraResponse& r) const {
  if (r.session_id != cfg_.session_id) invalid("response for another session: " + r.session_id);
  if (r.evaluator_id.empty()) invalid("evaluator id required");
  if (!find_trial(r.trial_id)) throw Error(ErrorCategory::kNotFound, "unknown trial: " + r.trial_id);
  for (const auto& [cond, score] : r.scores) {
    if (std::find(cfg_.conditions.begin(), cfg_.conditions.end(), cond) == cfg_.conditions.end()) {
      invalid("unknown condition: " + cond);
    }
    if (score < 0 || score > 100) invalid("score out of [0,100]: " + std::to_string(score));
  }
  for (const auto& cond : cfg_.conditions) {
    if (!r.scores.count(cond)) invalid("partial score set: missing " + cond);
  }
}

Session::SubmitResult Session::submit(MushraResponse resp) {
  validate(resp);
  if (resp.timestamp.empty()) resp.timestamp = now_iso8601();
  std::lock_guard wlock(write_mu_);
  {
    std::ofstream out(dir_ / "responses.jsonl", std::ios::app | std::ios::binary);
    out << resp.to_json().dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCategory::kIo, "cannot append to response log");
  }
  const std::string who = resp.evaluator_id;
  const std::string trial = resp.trial_id;
  SubmitResult result;
  {
    std::unique_lock lock(mu_);
    ++log_lines_;
    auto key = std::make_pair(who, trial);
    result.replaced = responses_.count(key) > 0;
    responses_[key] = std::move(resp);
  }
  if (result.replaced) log_("replaced response of evaluator " + who + " for trial " + trial);
  if (++since_snapshot_ >= kSnapshotEvery) write_snapshot();
  return result;
}

Session::SubmitResult Session::submit_blinded(const std::string& evaluator,
                                              const std::string& trial_id,
                                              const std::map<std::string, int>& handle_scores) {
  MushraResponse r;
  r.session_id = cfg_.session_id;
  r.evaluator_id = evaluator;
  r.trial_id = trial_id;
  for (const auto& [handle, score] : handle_scores) {
    const Stimulus* s = find_stimulus(handle);
    if (!s || s->trial_id != trial_id) invalid("stimulus handle not in trial: " + handle);
    r.scores[s->condition] = score;
  }
  return submit(std::move(r));
}

void Session::snapshot() {
  std::lock_guard wlock(write_mu_);
  write_snapshot();
}

// Caller holds write_mu_.
void Session::write_snapshot() {
  std::shared_lock lock(mu_);
  json all = json::array();
  for (const auto& [_, r] : responses_) all.push_back(r.to_json());
  gateway::write_file_atomic(dir_ / "snapshot.json",
                             json{{"lines", log_lines_}, {"responses", all}}.dump() + "\n");
  since_snapshot_ = 0;
}

std::vector<MushraResponse> Session::responses() const {
  std::shared_lock lock(mu_);
  std::vector<MushraResponse> out;
  for (const auto& [_, r] : responses_) out.push_back(r);
  return out;
}

std::vector<MushraStats> Session::stats() const {
  const auto rs = responses();
  std::vector<MushraStats> out;
  for (const auto& cond : cfg_.conditions) {
    std::size_t n = 0;
    for (const auto& r : rs) n += r.scores.count(cond);
    if (n >= 2) out.push_back(compute_stats(rs, cond));
  }
  return out;
}

std::string Session::report() const {
  const auto rs = responses();
  std::ostringstream out;
  out << "session " << cfg_.session_id << " (" << axis_name(cfg_.axis);
  if (!cfg_.group.empty()) out << ", " << cfg_.group;
  out << ")\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-32s %5s  %s\n", "condition", "n", "MUSHRA");
  out << buf;
  for (const auto& cond : cfg_.conditions) {
    std::vector<double> scores;
    for (const auto& r : rs) {
      if (auto it = r.scores.find(cond); it != r.scores.end()) scores.push_back(it->second);
    }
    const std::string cell =
        scores.size() >= 2 ? compute_stats(scores).rendered() : std::string("n/a");
    std::snprintf(buf, sizeof buf, "%-32s %5zu  %s\n", cond.c_str(), scores.size(), cell.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace accentkit::mushra
