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

// Parallel corpus manifests: transcripts, splits, augmentation selection and
// paired-utterance records.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "accentkit/gateway.h"

namespace accentkit::corpus {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kManifestVersion = 1;

struct Transcript {
  std::string id;
  std::string text;

  bool operator==(const Transcript&) const = default;
};

// Accepts a file of `( id "text" )` lines (festival style), `id<TAB>text`
// lines, or a directory of <id>.txt files.
std::vector<Transcript> load_transcripts(const std::filesystem::path& path);

// ---------------------------------------------------------------- sampling

// Uniform integer in [0, bound) by rejection; identical on every platform.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound);

// Fisher-Yates permutation of 0..n-1 driven by mt19937_64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

enum class Split { kTrain, kVal, kTest };
std::string_view split_name(Split s);
Split parse_split(std::string_view s);

struct SplitSizes {
  std::size_t train = 932;
  std::size_t val = 100;
  std::size_t test = 100;

  std::size_t total() const { return train + val + test; }
};

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::vector<std::string> train, val, test;

  std::optional<Split> of(const std::string& id) const;
  std::size_t size() const { return train.size() + val.size() + test.size(); }
  nlohmann::json to_json() const;
  static SplitAssignment from_json(const nlohmann::json& j);
};

// Shuffle under `seed`, then cut into train, val, test in that order.
SplitAssignment split_transcripts(const std::vector<std::string>& ids,
                                  const SplitSizes& sizes, std::uint64_t seed);

// Keeps transcripts with strictly fewer than `max_words` whitespace tokens,
// then samples exactly `count` of them; output keeps input order.
std::vector<Transcript> select_augmentation(const std::vector<Transcript>& transcripts,
                                            std::size_t max_words, std::size_t count,
                                            std::uint64_t seed);

// ---------------------------------------------------------------- manifest

struct SpeakerRef {
  std::string speaker_id;
  std::string l1_accent;
  std::vector<std::string> prompt_audio;      // asset ids; empty = all clips
  std::optional<std::string> recordings_dir;  // <utt>.wav ground truth

  nlohmann::json to_json() const;
  static SpeakerRef from_json(const nlohmann::json& j);
};

std::vector<SpeakerRef> load_speakers(const std::filesystem::path& path);

enum class Origin { kGroundTruth, kSynthesized };

struct PairedUtterance {
  std::string utt_id;
  std::string transcript_id;
  std::string text;
  std::string target_text;  // transliterated
  std::string speaker_id;
  std::string source_accent;
  std::string target_accent;
  std::string source_audio;  // relative to the corpus root, empty until synthesized
  std::string target_audio;
  Split split = Split::kTrain;
  Origin origin = Origin::kSynthesized;
  double target_duration = 0.0;

  nlohmann::json to_json() const;
  static PairedUtterance from_json(const nlohmann::json& j);
};

struct CorpusManifest {
  int version = kManifestVersion;
  std::vector<SpeakerRef> speakers;
  std::vector<PairedUtterance> utterances;
  SplitAssignment splits;
  nlohmann::json provenance = nlohmann::json::object();

  nlohmann::json to_json() const;
  static CorpusManifest from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static CorpusManifest load(const std::filesystem::path& path);
};

struct Issue {
  std::string kind;  // dangling_ref, duplicate_id, split_leak, split_mismatch, unsynthesized
  std::string utt_id;
  std::string detail;
  bool error = true;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const;  // no error-level issues
  std::size_t count(std::string_view kind) const;
  nlohmann::json to_json() const;
};

// Pure check of a manifest against the files under `root`.
ValidationReport validate_manifest(const CorpusManifest& manifest,
                                   const std::filesystem::path& root,
                                   bool require_audio = true);

// Paired records for every speaker x language x transcript, without audio.
std::vector<PairedUtterance> plan_utterances(
    const std::vector<SpeakerRef>& speakers, const std::vector<Transcript>& transcripts,
    const SplitAssignment& splits, const std::vector<std::string>& target_accents,
    const std::string& source_accent = "american");

struct BuildResult {
  CorpusManifest manifest;
  ValidationReport report;
};

BuildResult build_manifest(std::vector<SpeakerRef> speakers, SplitAssignment splits,
                           std::vector<PairedUtterance> utterances,
                           const std::filesystem::path& root, nlohmann::json provenance,
                           bool require_audio);

// Fills missing audio through `tts`, copying clips into root/audio/.
// Source audio comes from the speaker's recordings when present.
struct SynthOptions {
  std::filesystem::path asset_root;
  nlohmann::json params = nlohmann::json::object();
};
int synthesize_manifest(CorpusManifest& manifest, gateway::TtsService& tts,
                        const std::filesystem::path& root, const SynthOptions& opts);

}  // namespace accentkit::corpus
