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

// Objective metrics over ingested ASR transcripts, classifier probabilities
// and embeddings.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace accentkit::evalkit {

struct NormalizeOptions {
  bool lowercase = true;
  bool strip_punctuation = true;  // apostrophes are kept
};

// Lowercases, drops punctuation and collapses whitespace.
std::string normalize_transcript(std::string_view s, const NormalizeOptions& opts = {});

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;

  std::size_t edits() const { return substitutions + deletions + insertions; }
  double rate() const;
  EditCounts& operator+=(const EditCounts& o);
  bool operator==(const EditCounts&) const = default;
};

// Levenshtein alignment. Among minimal alignments the backtrace prefers
// match/substitution, then deletion, then insertion.
template <typename T>
EditCounts align(const std::vector<T>& ref, const std::vector<T>& hyp);

EditCounts wer(std::string_view ref, std::string_view hyp, const NormalizeOptions& opts = {});
// Code points of the normalized strings, single spaces included.
EditCounts cer(std::string_view ref, std::string_view hyp, const NormalizeOptions& opts = {});

double cosine(std::span<const double> a, std::span<const double> b);
double aecs_diff(std::span<const double> converted, std::span<const double> accented,
                 std::span<const double> native);
double aggregate_probs(std::span<const double> probs);

// Fixed-point rendering, "%.<digits>f".
std::string format_fixed(double v, int digits);

// ---------------------------------------------------------------- sidecars

// `id<TAB>text` lines.
std::map<std::string, std::string> load_text_sidecar(const std::filesystem::path& path);
// `id<TAB>v1,v2,...` lines.
std::map<std::string, std::vector<double>> load_vector_sidecar(const std::filesystem::path& path);
// `id<TAB>p` lines, p in [0,1].
std::map<std::string, double> load_prob_sidecar(const std::filesystem::path& path);

// Per-utterance inputs. Embedding keys carry a role suffix:
// accent embeddings `<utt>:converted`, `<utt>:accented`, `<utt>:native`;
// speaker embeddings `<utt>:converted`, `<utt>:source`.
struct EvalInputs {
  std::map<std::string, std::string> references;  // utt -> reference text
  std::map<std::string, std::string> hypotheses;  // utt -> ASR output
  std::map<std::string, double> probs;
  std::map<std::string, std::vector<double>> accent_embeddings;
  std::map<std::string, std::vector<double>> speaker_embeddings;
  NormalizeOptions normalize;
};

struct UtteranceRow {
  std::string utt_id;
  std::optional<EditCounts> word;
  std::optional<EditCounts> chr;
  std::optional<double> prob;
  std::optional<double> aecs_diff;
  std::optional<double> secs;
};

struct MetricSummary {
  std::size_t n = 0;
  double value = 0.0;
};

struct MetricReport {
  std::vector<UtteranceRow> rows;  // sorted by utt_id
  MetricSummary wer_pooled, wer_mean, cer_pooled, cer_mean;
  MetricSummary prob_mean, aecs_diff_mean, secs_mean;

  nlohmann::json to_json() const;
  std::string table() const;
};

MetricReport evaluate(const EvalInputs& in);

}  // namespace accentkit::evalkit
