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

// Word-level transliteration of English sentences through an LLM: prompt
// construction, response parsing, multi-run aggregation and sentence
// assembly.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "accentkit/g2p.h"
#include "accentkit/gateway.h"

namespace accentkit::transliterator {

enum class Language { kHindi, kJapanese, kKorean, kMandarin };

// Accepts names and ISO codes: "japanese", "ja", "Korean", "ko", ...
Language parse_language(std::string_view id);
std::string_view language_name(Language lang);  // "Japanese"
std::string_view language_code(Language lang);  // "ja"
std::vector<Language> all_languages();

// Script check used to reject e.g. Latin output where Hangul was asked for.
bool in_target_script(Language lang, char32_t cp);
bool is_target_script_text(Language lang, std::string_view text);

struct FewShots {
  std::string language = "Hindi";  // language of the examples
  std::string content;             // inserted verbatim after the marker line

  static FewShots load(const std::filesystem::path& path,
                       std::string language = "Hindi");
};

// Words are deduplicated by normalized spelling, first occurrence wins.
std::vector<g2p::PhonemeSequence> unique_words(
    const std::vector<g2p::PhonemeSequence>& words);

std::string build_prompt(const std::vector<g2p::PhonemeSequence>& words,
                         Language lang, const FewShots& few_shots);

struct TranslitChoice {
  std::string word;
  std::string phonemes;
  std::array<std::string, 3> choices;
  std::array<std::string, 3> similarity_order;

  nlohmann::json to_json() const;
};

struct Rejection {
  std::string word;
  std::string reason;
};

struct TranslitRun {
  std::string model_id;
  int run_index = 0;
  std::vector<TranslitChoice> per_word;  // prompt order, valid words only
  std::vector<Rejection> rejected;
  std::vector<std::string> missing;
  std::string raw;

  const TranslitChoice* find(std::string_view word) const;
  nlohmann::json to_json() const;
};

// Extracts the first JSON object in `raw`, tolerating prose, code fences,
// trailing commas and backtick-quoted strings. Throws kParse when there is
// no object or no word survives validation.
TranslitRun parse_response(std::string_view raw,
                           const std::vector<std::string>& expected_words,
                           Language lang);

struct RankWeights {
  std::array<double, 3> w{3.0, 2.0, 1.0};

  void validate() const;  // strictly decreasing, positive
};

struct ScoredCandidate {
  std::string text;
  double score = 0.0;
  int frequency = 0;  // runs listing the candidate
  double similarity = 0.0;
  std::array<int, 3> rank_counts{0, 0, 0};
};

struct TokenRanking {
  g2p::PhonemeSequence word;
  std::vector<ScoredCandidate> ranking;  // best first
};

// Phonetic similarity of a target-script candidate to the English phones,
// 0 when the candidate cannot be romanized.
double candidate_similarity(const g2p::PhonemeSequence& word, Language lang,
                            std::string_view candidate);

// Order: score desc, frequency desc, similarity desc, code point asc.
// Throws kNotFound listing words that no run covered.
std::vector<TokenRanking> aggregate_candidates(
    const std::vector<TranslitRun>& runs,
    const std::vector<g2p::PhonemeSequence>& words, Language lang,
    const RankWeights& weights = {});

enum class ArticleKey { kTheV, kTheC, kA, kAn };

std::string_view article_key_name(ArticleKey key);  // "THE_V", ...
bool is_article(std::string_view word);
ArticleKey resolve_article(std::string_view article,
                           const g2p::PhonemeSequence& next);
// Context-free form used when nothing follows the article.
ArticleKey default_article(std::string_view article);
g2p::PhonemeSequence article_phonemes(ArticleKey key);

struct TranslitSentence {
  Language language = Language::kJapanese;
  std::vector<std::string> tokens;
  std::string rendered;
  nlohmann::json provenance = nlohmann::json::array();

  nlohmann::json to_json() const;
};

// One selection per source token, in order.
TranslitSentence assemble_sentence(const std::vector<std::string>& selections,
                                   const g2p::TokenizedSentence& source,
                                   Language lang);
// Selections keyed by normalized word.
TranslitSentence assemble_sentence(
    const std::map<std::string, std::string>& selections,
    const g2p::TokenizedSentence& source, Language lang);

struct RunPlan {
  std::vector<std::pair<std::string, int>> models = {{"gpt-3.5-turbo", 3},
                                                     {"gpt-4o", 3}};

  int total() const;
  // model id for a global run index
  const std::string& model_for(int run_index) const;
  // Splits `runs` across the default models, first model taking the extra.
  static RunPlan with_total(int runs);
};

struct TransliteratorConfig {
  RunPlan plan;
  RankWeights weights;
  FewShots few_shots;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::filesystem::path> runs_dir;
  bool parallel = true;
};

class Transliterator {
 public:
  Transliterator(const g2p::Lexicon& lexicon, gateway::LlmService& llm,
                 TransliteratorConfig cfg);

  TranslitSentence transliterate(std::string_view text, Language lang);

  // All planned runs for one prompt; failed runs are omitted. Throws the
  // first failure when every run fails.
  std::vector<TranslitRun> execute_runs(
      const std::vector<g2p::PhonemeSequence>& words, Language lang,
      const std::string& audit_key);

  // Top candidate for an article form, fetched once per language.
  std::string article(ArticleKey key, Language lang);

  const TransliteratorConfig& config() const { return cfg_; }

 private:
  void persist(const std::string& audit_key, Language lang,
               const gateway::LlmRequest& req, const TranslitRun* run,
               const std::string& error) const;

  const g2p::Lexicon& lexicon_;
  gateway::LlmService& llm_;
  TransliteratorConfig cfg_;
  std::mutex articles_mu_;
  std::map<std::pair<Language, ArticleKey>, std::string> articles_;
};

}  // namespace accentkit::transliterator
