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

#include "accentkit/corpus.h"

#include <algorithm>
#include <cctype>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "accentkit/digest.h"
#include "accentkit/error.h"
#include "accentkit/text.h"

namespace accentkit::corpus {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- transcripts

namespace {

std::optional<Transcript> parse_festival_line(std::string_view line) {
  // ( arctic_a0001 "Author of the danger trail, Philip Steels, etc." )
  std::string_view s = text::trim(line);
  if (s.size() < 4 || s.front() != '(' || s.back() != ')') return std::nullopt;
  s = text::trim(s.substr(1, s.size() - 2));
  size_t sp = s.find_first_of(" \t");
  if (sp == std::string_view::npos) return std::nullopt;
  std::string_view id = s.substr(0, sp);
  std::string_view rest = text::trim(s.substr(sp));
  if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"') return std::nullopt;
  return Transcript{std::string(id), std::string(rest.substr(1, rest.size() - 2))};
}

}  // namespace

std::vector<Transcript> load_transcripts(const fs::path& path) {
  std::vector<Transcript> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string body = gateway::read_file(f);
      out.push_back({f.stem().string(), std::string(text::trim(body))});
    }
    return out;
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read transcripts " + path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (auto f = parse_festival_line(t)) {
      out.push_back(*f);
    } else if (size_t tab = line.find('\t'); tab != std::string::npos) {
      out.push_back({std::string(text::trim(std::string_view(line).substr(0, tab))),
                     std::string(text::trim(std::string_view(line).substr(tab + 1)))});
    } else {
      throw Error(ErrorCategory::kParse, path.string() + ":" + std::to_string(lineno) +
                                             ": expected `( id \"text\" )` or `id<TAB>text`");
    }
  }
  return out;
}

// ---------------------------------------------------------------- sampling

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCategory::kInvalidArgument, "bound must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = n; i > 1; --i) {
    size_t j = static_cast<size_t>(bounded(rng, i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw Error(ErrorCategory::kParse, "unknown split '" + std::string(s) + "'");
}

std::optional<Split> SplitAssignment::of(const std::string& id) const {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  if (has(train)) return Split::kTrain;
  if (has(val)) return Split::kVal;
  if (has(test)) return Split::kTest;
  return std::nullopt;
}

json SplitAssignment::to_json() const {
  return {{"seed", seed}, {"train", train}, {"val", val}, {"test", test}};
}

SplitAssignment SplitAssignment::from_json(const json& j) {
  SplitAssignment s;
  s.seed = j.value("seed", std::uint64_t{0});
  s.train = j.at("train").get<std::vector<std::string>>();
  s.val = j.at("val").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

SplitAssignment split_transcripts(const std::vector<std::string>& ids,
                                  const SplitSizes& sizes, std::uint64_t seed) {
  if (sizes.total() != ids.size()) {
    throw Error(ErrorCategory::kInvalidArgument,
                "split sizes sum to " + std::to_string(sizes.total()) + " but there are " +
                    std::to_string(ids.size()) + " transcripts");
  }
  std::set<std::string> uniq(ids.begin(), ids.end());
  if (uniq.size() != ids.size()) {
    throw Error(ErrorCategory::kInvalidArgument, "duplicate transcript ids");
  }
  const auto perm = seeded_permutation(ids.size(), seed);
  SplitAssignment out;
  out.seed = seed;
  for (size_t k = 0; k < perm.size(); ++k) {
    const std::string& id = ids[perm[k]];
    if (k < sizes.train) out.train.push_back(id);
    else if (k < sizes.train + sizes.val) out.val.push_back(id);
    else out.test.push_back(id);
  }
  return out;
}

std::vector<Transcript> select_augmentation(const std::vector<Transcript>& transcripts,
                                            std::size_t max_words, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < transcripts.size(); ++i) {
    if (text::split_whitespace(transcripts[i].text).size() < max_words) eligible.push_back(i);
  }
  if (eligible.size() < count) {
    throw Error(ErrorCategory::kInvalidArgument,
                "insufficient candidates: " + std::to_string(eligible.size()) +
                    " transcripts have fewer than " + std::to_string(max_words) +
                    " words, " + std::to_string(count) + " requested");
  }
  const auto perm = seeded_permutation(eligible.size(), seed);
  std::vector<size_t> picked;
  for (size_t k = 0; k < count; ++k) picked.push_back(eligible[perm[k]]);
  std::sort(picked.begin(), picked.end());
  std::vector<Transcript> out;
  for (size_t i : picked) out.push_back(transcripts[i]);
  return out;
}

// ---------------------------------------------------------------- records

json SpeakerRef::to_json() const {
  json j = {{"id", speaker_id}, {"accent", l1_accent}, {"prompt_audio", prompt_audio}};
  if (recordings_dir) j["recordings_dir"] = *recordings_dir;
  return j;
}

SpeakerRef SpeakerRef::from_json(const json& j) {
  SpeakerRef s;
  s.speaker_id = j.at("id").get<std::string>();
  s.l1_accent = j.value("accent", std::string());
  s.prompt_audio = j.value("prompt_audio", std::vector<std::string>{});
  if (j.contains("recordings_dir")) s.recordings_dir = j["recordings_dir"].get<std::string>();
  return s;
}

std::vector<SpeakerRef> load_speakers(const fs::path& path) {
  json j;
  try {
    j = json::parse(gateway::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, path.string() + ": " + e.what());
  }
  const json& arr = j.is_object() ? j.at("speakers") : j;
  std::vector<SpeakerRef> out;
  std::set<std::string> seen;
  for (const auto& s : arr) {
    out.push_back(SpeakerRef::from_json(s));
    if (!seen.insert(out.back().speaker_id).second) {
      throw Error(ErrorCategory::kInvalidArgument,
                  "duplicate speaker id " + out.back().speaker_id);
    }
  }
  return out;
}

json PairedUtterance::to_json() const {
  return {{"utt_id", utt_id},
          {"transcript_id", transcript_id},
          {"text", text},
          {"target_text", target_text},
          {"speaker_id", speaker_id},
          {"source_accent", source_accent},
          {"target_accent", target_accent},
          {"source_audio", source_audio},
          {"target_audio", target_audio},
          {"split", std::string(split_name(split))},
          {"origin", origin == Origin::kGroundTruth ? "ground-truth" : "synthesized"},
          {"target_duration", target_duration}};
}

PairedUtterance PairedUtterance::from_json(const json& j) {
  PairedUtterance u;
  u.utt_id = j.at("utt_id").get<std::string>();
  u.transcript_id = j.at("transcript_id").get<std::string>();
  u.text = j.at("text").get<std::string>();
  u.target_text = j.value("target_text", std::string());
  u.speaker_id = j.at("speaker_id").get<std::string>();
  u.source_accent = j.value("source_accent", std::string());
  u.target_accent = j.value("target_accent", std::string());
  u.source_audio = j.value("source_audio", std::string());
  u.target_audio = j.value("target_audio", std::string());
  u.split = parse_split(j.at("split").get<std::string>());
  u.origin = j.value("origin", std::string("synthesized")) == "ground-truth"
                 ? Origin::kGroundTruth
                 : Origin::kSynthesized;
  u.target_duration = j.value("target_duration", 0.0);
  return u;
}

json CorpusManifest::to_json() const {
  json sp = json::array();
  for (const auto& s : speakers) sp.push_back(s.to_json());
  json ut = json::array();
  for (const auto& u : utterances) ut.push_back(u.to_json());
  return {{"version", version},
          {"speakers", sp},
          {"splits", splits.to_json()},
          {"utterances", ut},
          {"provenance", provenance}};
}

CorpusManifest CorpusManifest::from_json(const json& j) {
  CorpusManifest m;
  m.version = j.at("version").get<int>();
  if (m.version != kManifestVersion) {
    throw Error(ErrorCategory::kParse, "unsupported manifest version " +
                                           std::to_string(m.version));
  }
  for (const auto& s : j.at("speakers")) m.speakers.push_back(SpeakerRef::from_json(s));
  m.splits = SplitAssignment::from_json(j.at("splits"));
  for (const auto& u : j.at("utterances")) m.utterances.push_back(PairedUtterance::from_json(u));
  m.provenance = j.value("provenance", json::object());
  return m;
}

void CorpusManifest::save(const fs::path& path) const {
  gateway::write_file_atomic(path, to_json().dump(2) + "\n");
}

CorpusManifest CorpusManifest::load(const fs::path& path) {
  try {
    return from_json(json::parse(gateway::read_file(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- validation

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const Issue& i) { return i.error; });
}

std::size_t ValidationReport::count(std::string_view kind) const {
  return static_cast<size_t>(std::count_if(issues.begin(), issues.end(),
                                           [&](const Issue& i) { return i.kind == kind; }));
}

json ValidationReport::to_json() const {
  json arr = json::array();
  for (const auto& i : issues) {
    arr.push_back({{"kind", i.kind},
                   {"utt_id", i.utt_id},
                   {"detail", i.detail},
                   {"severity", i.error ? "error" : "warning"}});
  }
  return {{"ok", ok()}, {"issues", arr}};
}

namespace {

std::string leak_key(std::string_view s) {
  std::string out;
  for (const auto& w : text::split_whitespace(s)) {
    std::string t;
    for (char c : w) {
      if (!std::ispunct(static_cast<unsigned char>(c)) || c == '\'') t += c;
    }
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += text::ascii_lower(t);
  }
  return out;
}

}  // namespace

ValidationReport validate_manifest(const CorpusManifest& m, const fs::path& root,
                                   bool require_audio) {
  ValidationReport r;
  std::set<std::string> speakers;
  for (const auto& s : m.speakers) {
    if (!speakers.insert(s.speaker_id).second) {
      r.issues.push_back({"duplicate_id", "", "speaker " + s.speaker_id});
    }
  }
  std::map<std::string, int> seen_split_ids;
  for (const auto* v : {&m.splits.train, &m.splits.val, &m.splits.test}) {
    for (const auto& id : *v) ++seen_split_ids[id];
  }
  for (const auto& [id, n] : seen_split_ids) {
    if (n > 1) r.issues.push_back({"split_mismatch", "", id + " is in " + std::to_string(n) + " splits"});
  }

  std::set<std::string> utt_ids;
  std::map<std::string, std::pair<Split, std::string>> first_by_text;
  for (const auto& u : m.utterances) {
    if (!utt_ids.insert(u.utt_id).second) {
      r.issues.push_back({"duplicate_id", u.utt_id, "utterance id repeated"});
    }
    if (!speakers.count(u.speaker_id)) {
      r.issues.push_back({"dangling_ref", u.utt_id, "unknown speaker " + u.speaker_id});
    }
    auto split = m.splits.of(u.transcript_id);
    if (!split) {
      r.issues.push_back({"dangling_ref", u.utt_id, "transcript " + u.transcript_id +
                                                        " has no split"});
    } else if (*split != u.split) {
      r.issues.push_back({"split_mismatch", u.utt_id,
                          "record says " + std::string(split_name(u.split)) +
                              ", assignment says " + std::string(split_name(*split))});
    }
    for (const auto& [field, ref] : {std::pair<const char*, const std::string*>{"source_audio", &u.source_audio},
                                     {"target_audio", &u.target_audio}}) {
      if (ref->empty()) {
        if (require_audio) r.issues.push_back({"unsynthesized", u.utt_id, std::string(field) + " is empty"});
      } else if (!fs::is_regular_file(root / *ref)) {
        r.issues.push_back({"dangling_ref", u.utt_id, std::string(field) + " " + *ref + " not found"});
      }
    }
    const std::string key = leak_key(u.text);
    auto [it, inserted] = first_by_text.emplace(key, std::make_pair(u.split, u.utt_id));
    if (!inserted && it->second.first != u.split) {
      r.issues.push_back({"split_leak", u.utt_id,
                          "same text as " + it->second.second + " in " +
                              std::string(split_name(it->second.first)),
                          false});
    }
  }
  return r;
}

std::vector<PairedUtterance> plan_utterances(const std::vector<SpeakerRef>& speakers,
                                             const std::vector<Transcript>& transcripts,
                                             const SplitAssignment& splits,
                                             const std::vector<std::string>& target_accents,
                                             const std::string& source_accent) {
  std::vector<PairedUtterance> out;
  for (const auto& s : speakers) {
    for (const auto& accent : target_accents) {
      for (const auto& t : transcripts) {
        auto split = splits.of(t.id);
        if (!split) {
          throw Error(ErrorCategory::kInvalidArgument, "transcript " + t.id + " has no split");
        }
        PairedUtterance u;
        u.utt_id = s.speaker_id + "_" + accent + "_" + t.id;
        u.transcript_id = t.id;
        u.text = t.text;
        u.speaker_id = s.speaker_id;
        u.source_accent = source_accent;
        u.target_accent = accent;
        u.split = *split;
        u.origin = s.recordings_dir ? Origin::kGroundTruth : Origin::kSynthesized;
        out.push_back(std::move(u));
      }
    }
  }
  return out;
}

BuildResult build_manifest(std::vector<SpeakerRef> speakers, SplitAssignment splits,
                           std::vector<PairedUtterance> utterances, const fs::path& root,
                           json provenance, bool require_audio) {
  BuildResult r;
  r.manifest.speakers = std::move(speakers);
  r.manifest.splits = std::move(splits);
  r.manifest.utterances = std::move(utterances);
  r.manifest.provenance = std::move(provenance);
  r.report = validate_manifest(r.manifest, root, require_audio);
  return r;
}

// ---------------------------------------------------------------- synthesis

int synthesize_manifest(CorpusManifest& manifest, gateway::TtsService& tts,
                        const fs::path& root, const SynthOptions& opts) {
  std::map<std::string, std::vector<std::string>> prompts;
  std::map<std::string, const SpeakerRef*> by_id;
  for (const auto& s : manifest.speakers) {
    by_id[s.speaker_id] = &s;
    prompts[s.speaker_id] = s.prompt_audio.empty()
                                ? gateway::speaker_clips(opts.asset_root, s.speaker_id)
                                : s.prompt_audio;
  }
  auto store = [&](const std::string& wav) {
    const std::string rel = "audio/" + sha256_hex(wav) + ".wav";
    if (!fs::exists(root / rel)) gateway::write_file_atomic(root / rel, wav);
    return rel;
  };

  int requests = 0;
  for (auto& u : manifest.utterances) {
    auto sp = by_id.find(u.speaker_id);
    if (sp == by_id.end()) {
      throw Error(ErrorCategory::kNotFound, u.utt_id + ": unknown speaker " + u.speaker_id);
    }
    if (u.target_audio.empty()) {
      if (u.target_text.empty()) {
        throw Error(ErrorCategory::kInvalidArgument,
                    u.utt_id + ": no transliterated text to synthesize");
      }
      auto res = tts.synthesize({u.target_text, prompts[u.speaker_id], opts.params});
      ++requests;
      u.target_audio = store(res.wav);
      u.target_duration = res.meta.duration_seconds;
    }
    if (u.source_audio.empty()) {
      const SpeakerRef& s = *sp->second;
      fs::path gt;
      if (s.recordings_dir) gt = opts.asset_root / *s.recordings_dir / (u.transcript_id + ".wav");
      if (!gt.empty() && fs::is_regular_file(gt)) {
        u.source_audio = store(gateway::read_file(gt));
        u.origin = Origin::kGroundTruth;
      } else {
        auto res = tts.synthesize({u.text, prompts[u.speaker_id], opts.params});
        ++requests;
        u.source_audio = store(res.wav);
        u.origin = Origin::kSynthesized;
      }
    }
  }
  return requests;
}

}  // namespace accentkit::corpus
