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

// End-to-end corpus construction: transcripts -> transliteration -> paired
// manifest -> synthesis.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "accentkit/corpus.h"
#include "accentkit/gateway.h"
#include "accentkit/transliterator.h"

namespace accentkit::pipeline {

struct AugmentConfig {
  std::size_t count = 4500;
  std::size_t max_words = 15;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  std::filesystem::path transcripts;
  std::filesystem::path speakers;
  std::filesystem::path lexicon;    // optional for dry runs
  std::filesystem::path few_shots;  // optional
  std::filesystem::path output = "out";
  std::filesystem::path cache_root = "cache";
  std::filesystem::path asset_root = ".";
  std::vector<std::string> languages;
  transliterator::RunPlan plan;
  std::array<double, 3> weights{3.0, 2.0, 1.0};
  corpus::SplitSizes split;
  std::uint64_t split_seed = 0;
  std::optional<AugmentConfig> augment;  // replaces the split: every pick goes to train
  std::string source_accent = "american";
  nlohmann::json llm_params = nlohmann::json::object();
  nlohmann::json tts_params = nlohmann::json::object();
  std::string llm_base_url;
  std::string tts_base_url;
  std::string tts_provider = "tts";
  int max_in_flight = 4;

  // Relative paths resolve against `base_dir`.
  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;
  // to_json() without endpoint and concurrency settings; hashed and recorded
  // as manifest provenance.
  nlohmann::json identity_json() const;
  std::string hash() const;
  void validate() const;
};

// Reads a JSON config; LLM_BASE_URL / TTS_BASE_URL override the file.
PipelineConfig load_config(const std::filesystem::path& path);

struct Plan {
  std::size_t transcripts = 0;
  std::size_t languages = 0;
  std::size_t speakers = 0;
  std::size_t prompts = 0;  // sentence prompts, summed over languages
  int runs_per_prompt = 0;
  std::size_t llm_calls = 0;  // prompts x runs
  std::size_t article_prompts = 0;
  std::size_t article_llm_calls = 0;
  std::size_t utterances = 0;
  std::size_t tts_calls = 0;
  std::size_t oov_sentences = 0;
  bool lexicon_checked = false;

  nlohmann::json to_json() const;
};

// Local files only; never touches the network.
Plan make_plan(const PipelineConfig& cfg);

struct Services {
  gateway::LlmService& llm;
  gateway::TtsService* tts = nullptr;  // null skips synthesis
};

struct Failure {
  std::string transcript_id;
  std::string language;
  std::string category;
  std::string message;
};

struct Outcome {
  corpus::CorpusManifest manifest;
  corpus::ValidationReport report;
  std::vector<Failure> failures;
  int tts_requests = 0;

  nlohmann::json summary() const;
};

// Writes <output>/manifest.json, report.json and per-language
// transliterations/<code>.jsonl. Sentences that fail transliteration are
// listed in the outcome and left out of the manifest.
Outcome run(const PipelineConfig& cfg, Services services);

// Gateways configured from `cfg`; mode from the environment.
gateway::LlmConfig llm_config(const PipelineConfig& cfg);
gateway::TtsConfig tts_config(const PipelineConfig& cfg);

}  // namespace accentkit::pipeline
