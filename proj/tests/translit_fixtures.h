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

// Synthetic LLM responses and an independent aggregation scorer.

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "accentkit/g2p.h"
#include "accentkit/transliterator.h"

namespace accentkit::testing {

// Answers a transliteration prompt from a table keyed by "word:phonemes" or
// by normalized word; candidates are listed in similarity order.
class Responder {
 public:
  explicit Responder(std::map<std::string, std::array<std::string, 3>> table)
      : table_(std::move(table)) {}

  std::string operator()(const gateway::LlmRequest& req) const {
    const std::string& p = req.prompt;
    const std::string marker = "[Few Shot Examples]\n```\n";
    size_t start = p.find(marker);
    if (start == std::string::npos) return "{}";
    start += marker.size();
    const size_t end = p.find("```", start);
    nlohmann::json out = nlohmann::json::object();
    size_t pos = start;
    while (pos < end) {
      size_t nl = p.find('\n', pos);
      const std::string line = p.substr(pos, nl - pos);
      pos = nl + 1;
      const size_t colon = line.rfind(": ");
      const std::string word = line.substr(0, colon);
      const std::string phon = line.substr(colon + 2);
      auto it = table_.find(word + ":" + phon);
      if (it == table_.end()) it = table_.find(g2p::normalize_word(word));
      if (it == table_.end()) continue;
      const auto& c = it->second;
      out[word] = {{"phonemes", phon},
                   {"choices", {c[1], c[2], c[0]}},
                   {"similarity order", {c[0], c[1], c[2]}}};
    }
    return "```json\n" + out.dump(2) + "\n```";
  }

 private:
  std::map<std::string, std::array<std::string, 3>> table_;
};

struct RunSet {
  std::vector<g2p::PhonemeSequence> words;
  std::vector<transliterator::TranslitRun> runs;
};

// <=6 runs, <=5 words, candidates drawn from a small katakana pool so that
// score and frequency ties are common.
inline RunSet random_run_set(std::mt19937& rng, const g2p::Lexicon& lex) {
  static const std::vector<std::string> kWordPool = {"go", "let's", "apple", "accent",
                                                     "trail", "hour", "drawing"};
  static const std::vector<std::string> kCandidates = {"ゴー", "ゴウ", "ゴ", "ガー",
                                                       "レッツ", "レツ", "アクセント"};
  RunSet rs;
  std::vector<std::string> pool = kWordPool;
  std::shuffle(pool.begin(), pool.end(), rng);
  const int n_words = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n_words; ++i) rs.words.push_back(g2p::phonemize_word(lex, pool[i]));
  const int n_runs = 1 + static_cast<int>(rng() % 6);
  for (int r = 0; r < n_runs; ++r) {
    transliterator::TranslitRun run;
    run.run_index = r;
    for (const auto& w : rs.words) {
      if (r > 0 && rng() % 6 == 0) continue;  // word missing from this run
      std::vector<std::string> c = kCandidates;
      std::shuffle(c.begin(), c.end(), rng);
      transliterator::TranslitChoice tc;
      tc.word = w.word;
      tc.similarity_order = {c[0], c[1], c[2]};
      tc.choices = {c[2], c[0], c[1]};
      run.per_word.push_back(tc);
    }
    rs.runs.push_back(run);
  }
  return rs;
}

// Lists every (word, candidate, run, rank) contribution, then ranks by
// repeated selection of the best remaining candidate.
inline std::vector<std::vector<std::pair<std::string, double>>> brute_force_rankings(
    const std::vector<transliterator::TranslitRun>& runs,
    const std::vector<g2p::PhonemeSequence>& words, transliterator::Language lang,
    std::array<double, 3> weights) {
  std::vector<std::tuple<std::string, std::string, size_t, int>> contributions;
  for (size_t r = 0; r < runs.size(); ++r) {
    for (const auto& tc : runs[r].per_word) {
      for (int k = 0; k < 3; ++k) {
        contributions.emplace_back(tc.word, tc.similarity_order[k], r, k);
      }
    }
  }
  std::vector<std::vector<std::pair<std::string, double>>> out;
  for (const auto& w : words) {
    std::set<std::string> cands;
    for (const auto& [word, cand, run, rank] : contributions) {
      if (word == w.word) cands.insert(cand);
    }
    struct Row {
      std::string text;
      double score = 0;
      int freq = 0;
      double sim = 0;
    };
    std::vector<Row> rows;
    for (const auto& c : cands) {
      Row row{c};
      std::set<size_t> in_runs;
      for (const auto& [word, cand, run, rank] : contributions) {
        if (word == w.word && cand == c) {
          row.score += weights[rank];
          in_runs.insert(run);
        }
      }
      row.freq = static_cast<int>(in_runs.size());
      row.sim = transliterator::candidate_similarity(w, lang, c);
      rows.push_back(row);
    }
    std::vector<std::pair<std::string, double>> ranked;
    while (!rows.empty()) {
      size_t best = 0;
      for (size_t i = 1; i < rows.size(); ++i) {
        const Row& a = rows[i];
        const Row& b = rows[best];
        bool better = a.score > b.score ||
                      (a.score == b.score &&
                       (a.freq > b.freq ||
                        (a.freq == b.freq &&
                         (a.sim > b.sim || (a.sim == b.sim && a.text < b.text)))));
        if (better) best = i;
      }
      ranked.emplace_back(rows[best].text, rows[best].score);
      rows.erase(rows.begin() + static_cast<long>(best));
    }
    out.push_back(ranked);
  }
  return out;
}

}  // namespace accentkit::testing
