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

#include "accentkit/transliterator.h"

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "accentkit/digest.h"
#include "accentkit/error.h"
#include "accentkit/phonosim.h"
#include "accentkit/romanizer.h"
#include "accentkit/text.h"

namespace accentkit::transliterator {
namespace fs = std::filesystem;
using nlohmann::json;
using text::ascii_lower;
using text::decode_utf8;
using text::join;
using text::nfc;
using text::trim;

// ---------------------------------------------------------------- languages

Language parse_language(std::string_view id) {
  const std::string s = ascii_lower(trim(id));
  if (s == "hindi" || s == "hi") return Language::kHindi;
  if (s == "japanese" || s == "ja") return Language::kJapanese;
  if (s == "korean" || s == "ko") return Language::kKorean;
  if (s == "mandarin" || s == "chinese" || s == "zh") return Language::kMandarin;
  throw Error(ErrorCategory::kInvalidArgument,
              "unsupported language '" + std::string(id) + "'");
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::kHindi: return "Hindi";
    case Language::kJapanese: return "Japanese";
    case Language::kKorean: return "Korean";
    case Language::kMandarin: return "Mandarin";
  }
  return "";
}

std::string_view language_code(Language lang) {
  switch (lang) {
    case Language::kHindi: return "hi";
    case Language::kJapanese: return "ja";
    case Language::kKorean: return "ko";
    case Language::kMandarin: return "zh";
  }
  return "";
}

std::vector<Language> all_languages() {
  return {Language::kHindi, Language::kJapanese, Language::kKorean,
          Language::kMandarin};
}

bool in_target_script(Language lang, char32_t cp) {
  switch (lang) {
    case Language::kHindi:
      return (cp >= 0x0900 && cp <= 0x097F) || cp == 0x200C || cp == 0x200D;
    case Language::kJapanese:
      return (cp >= 0x3040 && cp <= 0x309F) || (cp >= 0x30A0 && cp <= 0x30FF) ||
             (cp >= 0x31F0 && cp <= 0x31FF);
    case Language::kKorean:
      return (cp >= 0xAC00 && cp <= 0xD7A3) || (cp >= 0x1100 && cp <= 0x11FF) ||
             (cp >= 0x3130 && cp <= 0x318F);
    case Language::kMandarin:
      return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF);
  }
  return false;
}

bool is_target_script_text(Language lang, std::string_view text) {
  std::u32string cps;
  try {
    cps = decode_utf8(text);
  } catch (const Error&) {
    return false;
  }
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(),
                     [&](char32_t c) { return in_target_script(lang, c); });
}

namespace {

std::string_view trail_example(Language lang) {
  switch (lang) {
    case Language::kHindi: return "ट्रेल";
    case Language::kJapanese: return "トレイル";
    case Language::kKorean: return "트레일";
    case Language::kMandarin: return "特雷尔";
  }
  return "";
}

}  // namespace

FewShots FewShots::load(const fs::path& path, std::string language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read few-shot file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return FewShots{std::move(language), ss.str()};
}

// ---------------------------------------------------------------- prompt

std::vector<g2p::PhonemeSequence> unique_words(
    const std::vector<g2p::PhonemeSequence>& words) {
  std::vector<g2p::PhonemeSequence> out;
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (seen.insert(g2p::normalize_word(w.word)).second) out.push_back(w);
  }
  return out;
}

std::string build_prompt(const std::vector<g2p::PhonemeSequence>& words,
                         Language lang, const FewShots& few_shots) {
  if (words.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "prompt needs at least one word");
  }
  const std::vector<g2p::PhonemeSequence> uniq = unique_words(words);
  const std::string L(language_name(lang));

  std::string p;
  p += "Can you provide me with three " + L +
       " words to represent the phoneme sequences delimited by triple backticks. "
       "For example, in " + L + ", \"Trail (tɹˈeɪl)\" is expected to have " + L +
       " representation of \"" + std::string(trail_example(lang)) +
       "\"; where \"ˈ\" in phonemes represents the stress point of the word. "
       "Here, your task is to provide me with three " + L +
       " words that can replace the phoneme senquences, delimited by triple "
       "backticks. Please focus on phonetically similar characters instead of "
       "similar characters in terms of the meaning. The expected output should "
       "be in JSON format. You can first list three possible choices of the "
       "words and then re-order them in order of the similarity of the "
       "pronunciation.\n";
  p += "The following is the example in " + few_shots.language + " language.\n";
  p += "[Few Shot Examples]\n";
  if (!few_shots.content.empty()) {
    p += few_shots.content;
    if (p.back() != '\n') p += '\n';
  }
  p += "```\n";
  for (const auto& w : uniq) p += w.word + ": " + w.render() + "\n";
  p += "```\n";
  p += "Again, the responses should be in a JSON format and sort them in order "
       "of the similarity to each phoneme sequence.\n";
  p += "{\n";
  for (const auto& w : uniq) {
    p += "  " + json(w.word).dump() + ": {\n";
    p += "\"phonemes\": " + json(w.render()).dump() + ",\n";
    p += "\"choices\": [`1st choices of " + L + " characters`, `2nd choices of " +
         L + " characters`, `3rd choices of " + L + " characters`],\n";
    p += "\"similarity order\": [`1st most similar " + L +
         " characters`, `2nd most similar " + L + " characters`, `3rd most similar " +
         L + " characters`],\n";
    p += "},\n";
  }
  p += "}\n";
  return p;
}

// ---------------------------------------------------------------- parsing

json TranslitChoice::to_json() const {
  return {{"word", word},
          {"phonemes", phonemes},
          {"choices", choices},
          {"similarity order", similarity_order}};
}

const TranslitChoice* TranslitRun::find(std::string_view word) const {
  for (const auto& c : per_word) {
    if (c.word == word) return &c;
  }
  const std::string key = g2p::normalize_word(word);
  for (const auto& c : per_word) {
    if (g2p::normalize_word(c.word) == key) return &c;
  }
  return nullptr;
}

json TranslitRun::to_json() const {
  json words = json::array();
  for (const auto& c : per_word) words.push_back(c.to_json());
  json rej = json::array();
  for (const auto& r : rejected) rej.push_back({{"word", r.word}, {"reason", r.reason}});
  return {{"model_id", model_id}, {"run_index", run_index}, {"per_word", words},
          {"rejected", rej},      {"missing", missing},     {"raw", raw}};
}

namespace {

// Index one past the brace matching the '{' at `open`, or npos.
size_t match_brace(std::string_view s, size_t open) {
  int depth = 0;
  bool in_str = false;
  for (size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

// Rewrites near-JSON into JSON: backtick and curly-quoted strings become
// JSON strings; trailing commas are dropped.
std::string relax_json(std::string_view s) {
  static constexpr std::string_view kOpenQuote = "\xE2\x80\x9C";   // “
  static constexpr std::string_view kCloseQuote = "\xE2\x80\x9D";  // ”
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      size_t j = i + 1;
      while (j < s.size() && s[j] != '"') j += (s[j] == '\\') ? 2 : 1;
      out.append(s.substr(i, j - i + 1));
      i = j;
    } else if (c == '`') {
      size_t j = s.find('`', i + 1);
      if (j == std::string_view::npos) {
        out += c;
        continue;
      }
      out += json(std::string(s.substr(i + 1, j - i - 1))).dump();
      i = j;
    } else if (s.substr(i, kOpenQuote.size()) == kOpenQuote) {
      size_t j = s.find(kCloseQuote, i + kOpenQuote.size());
      if (j == std::string_view::npos) {
        out += c;
        continue;
      }
      out += json(std::string(s.substr(i + kOpenQuote.size(),
                                       j - i - kOpenQuote.size())))
                 .dump();
      i = j + kCloseQuote.size() - 1;
    } else if (c == ',') {
      size_t j = i + 1;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

std::optional<json> extract_object(std::string_view raw) {
  for (size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    size_t close = match_brace(raw, open);
    if (close == std::string_view::npos) continue;
    json j = json::parse(relax_json(raw.substr(open, close - open)), nullptr,
                         /*allow_exceptions=*/false);
    if (j.is_object()) return j;
  }
  return std::nullopt;
}

std::string clean_candidate(std::string s) {
  std::string_view v = trim(s);
  auto strip = [](std::string_view x) {
    for (std::string_view q : {"`", "\"", "'", "\xE2\x80\x9C", "\xE2\x80\x9D"}) {
      while (x.size() >= q.size() && x.substr(0, q.size()) == q) x.remove_prefix(q.size());
      while (x.size() >= q.size() && x.substr(x.size() - q.size()) == q) {
        x.remove_suffix(q.size());
      }
    }
    return x;
  };
  v = trim(strip(trim(v)));
  return nfc(v);
}

const json* find_key(const json& obj, const std::string& word) {
  auto it = obj.find(word);
  if (it != obj.end()) return &*it;
  const std::string norm = g2p::normalize_word(word);
  for (auto kv = obj.begin(); kv != obj.end(); ++kv) {
    if (g2p::normalize_word(kv.key()) == norm) return &kv.value();
  }
  return nullptr;
}

std::optional<std::array<std::string, 3>> read_triple(const json& entry,
                                                      std::initializer_list<const char*> keys,
                                                      std::string& reason) {
  const json* arr = nullptr;
  for (const char* k : keys) {
    auto it = entry.find(k);
    if (it != entry.end()) {
      arr = &*it;
      break;
    }
  }
  if (!arr) {
    reason = std::string("missing field '") + *keys.begin() + "'";
    return std::nullopt;
  }
  if (!arr->is_array() || arr->size() != 3) {
    reason = std::string("'") + *keys.begin() + "' must hold exactly 3 entries";
    return std::nullopt;
  }
  std::array<std::string, 3> out;
  for (size_t i = 0; i < 3; ++i) {
    if (!(*arr)[i].is_string()) {
      reason = std::string("'") + *keys.begin() + "' entries must be strings";
      return std::nullopt;
    }
    out[i] = clean_candidate((*arr)[i].get<std::string>());
  }
  return out;
}

}  // namespace

TranslitRun parse_response(std::string_view raw,
                           const std::vector<std::string>& expected_words,
                           Language lang) {
  if (trim(raw).empty()) throw Error(ErrorCategory::kParse, "empty response");
  std::optional<json> obj = extract_object(raw);
  if (!obj) throw Error(ErrorCategory::kParse, "no parsable object");

  TranslitRun run;
  run.raw = std::string(raw);
  std::set<std::string> seen;
  for (const auto& word : expected_words) {
    if (!seen.insert(g2p::normalize_word(word)).second) continue;
    const json* entry = find_key(*obj, word);
    if (!entry) {
      run.missing.push_back(word);
      continue;
    }
    if (!entry->is_object()) {
      run.rejected.push_back({word, "entry is not an object"});
      continue;
    }
    std::string reason;
    auto choices = read_triple(*entry, {"choices"}, reason);
    auto order = choices ? read_triple(*entry, {"similarity order", "similarity_order",
                                                "similarityOrder"},
                                       reason)
                         : std::nullopt;
    if (!choices || !order) {
      run.rejected.push_back({word, reason});
      continue;
    }
    auto a = *choices, b = *order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      run.rejected.push_back({word, "similarity order is not a permutation of choices"});
      continue;
    }
    auto bad = std::find_if(choices->begin(), choices->end(), [&](const std::string& c) {
      return !is_target_script_text(lang, c);
    });
    if (bad != choices->end()) {
      run.rejected.push_back(
          {word, "candidate '" + *bad + "' is not " + std::string(language_name(lang)) +
                     " script"});
      continue;
    }
    TranslitChoice tc;
    tc.word = word;
    auto ph = entry->find("phonemes");
    if (ph != entry->end() && ph->is_string()) tc.phonemes = nfc(ph->get<std::string>());
    tc.choices = *choices;
    tc.similarity_order = *order;
    run.per_word.push_back(std::move(tc));
  }
  if (run.per_word.empty()) {
    std::string why = "no valid words in response";
    if (!run.rejected.empty()) {
      why += " (" + run.rejected.front().word + ": " + run.rejected.front().reason + ")";
    }
    throw Error(ErrorCategory::kParse, why);
  }
  return run;
}

// ---------------------------------------------------------------- aggregation

void RankWeights::validate() const {
  if (!(w[0] > w[1] && w[1] > w[2] && w[2] > 0.0)) {
    throw Error(ErrorCategory::kInvalidArgument,
                "rank weights must be strictly decreasing and positive");
  }
}

double candidate_similarity(const g2p::PhonemeSequence& word, Language lang,
                            std::string_view candidate) {
  romanizer::Script script;
  switch (lang) {
    case Language::kHindi: script = romanizer::Script::kDevanagari; break;
    case Language::kJapanese: script = romanizer::Script::kKatakana; break;
    case Language::kKorean: script = romanizer::Script::kHangul; break;
    default: return 0.0;
  }
  try {
    const auto roman = romanizer::romanize(script, candidate);
    return phonosim::similarity(phonosim::keys_from_ipa(word),
                                phonosim::keys_from_roman(roman.text));
  } catch (const Error&) {
    return 0.0;
  }
}

std::vector<TokenRanking> aggregate_candidates(
    const std::vector<TranslitRun>& runs,
    const std::vector<g2p::PhonemeSequence>& words, Language lang,
    const RankWeights& weights) {
  weights.validate();
  if (runs.empty()) throw Error(ErrorCategory::kInvalidArgument, "no runs to aggregate");

  std::vector<TokenRanking> out;
  std::vector<std::string> uncovered;
  for (const auto& word : unique_words(words)) {
    std::map<std::string, ScoredCandidate> table;
    bool covered = false;
    for (const auto& run : runs) {
      const TranslitChoice* c = run.find(word.word);
      if (!c) continue;
      covered = true;
      std::set<std::string> in_run;
      for (int r = 0; r < 3; ++r) {
        const std::string cand = nfc(c->similarity_order[r]);
        auto& sc = table[cand];
        sc.text = cand;
        ++sc.rank_counts[r];
        if (in_run.insert(cand).second) ++sc.frequency;
      }
    }
    if (!covered) {
      uncovered.push_back(word.word);
      continue;
    }
    TokenRanking tr;
    tr.word = word;
    for (auto& [text, sc] : table) {
      sc.score = sc.rank_counts[0] * weights.w[0] + sc.rank_counts[1] * weights.w[1] +
                 sc.rank_counts[2] * weights.w[2];
      sc.similarity = candidate_similarity(word, lang, text);
      tr.ranking.push_back(sc);
    }
    std::sort(tr.ranking.begin(), tr.ranking.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.frequency != b.frequency) return a.frequency > b.frequency;
                if (a.similarity != b.similarity) return a.similarity > b.similarity;
                return a.text < b.text;  // UTF-8 byte order is code point order
              });
    out.push_back(std::move(tr));
  }
  if (!uncovered.empty()) {
    throw Error(ErrorCategory::kNotFound, "no run covered: " + join(uncovered, ", "));
  }
  return out;
}

// ---------------------------------------------------------------- articles

std::string_view article_key_name(ArticleKey key) {
  switch (key) {
    case ArticleKey::kTheV: return "THE_V";
    case ArticleKey::kTheC: return "THE_C";
    case ArticleKey::kA: return "A";
    case ArticleKey::kAn: return "AN";
  }
  return "";
}

bool is_article(std::string_view word) {
  const std::string w = g2p::normalize_word(word);
  return w == "a" || w == "an" || w == "the";
}

ArticleKey default_article(std::string_view article) {
  const std::string w = g2p::normalize_word(article);
  if (w == "the") return ArticleKey::kTheC;
  if (w == "a") return ArticleKey::kA;
  if (w == "an") return ArticleKey::kAn;
  throw Error(ErrorCategory::kInvalidArgument,
              "not an article: '" + std::string(article) + "'");
}

ArticleKey resolve_article(std::string_view article, const g2p::PhonemeSequence& next) {
  const ArticleKey base = default_article(article);
  if (next.phones.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "article needs a following word");
  }
  const bool vowel = g2p::is_ipa_vowel(next.phones.front());
  if (base == ArticleKey::kTheC) return vowel ? ArticleKey::kTheV : ArticleKey::kTheC;
  return vowel ? ArticleKey::kAn : ArticleKey::kA;
}

g2p::PhonemeSequence article_phonemes(ArticleKey key) {
  switch (key) {
    case ArticleKey::kTheV: return {"the", {"ð", "i"}, std::nullopt};
    case ArticleKey::kTheC: return {"the", {"ð", "ə"}, std::nullopt};
    case ArticleKey::kA: return {"a", {"ə"}, std::nullopt};
    case ArticleKey::kAn: return {"an", {"ə", "n"}, std::nullopt};
  }
  return {};
}

// ---------------------------------------------------------------- assembly

json TranslitSentence::to_json() const {
  return {{"language", std::string(language_code(language))},
          {"tokens", tokens},
          {"rendered", rendered},
          {"provenance", provenance}};
}

TranslitSentence assemble_sentence(const std::vector<std::string>& selections,
                                   const g2p::TokenizedSentence& source, Language lang) {
  if (source.tokens.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "source sentence has no words");
  }
  TranslitSentence out;
  out.language = lang;
  for (size_t i = 0; i < source.tokens.size(); ++i) {
    if (i >= selections.size() || selections[i].empty()) {
      throw Error(ErrorCategory::kNotFound,
                  "missing selection for '" + source.tokens[i].word + "'");
    }
    out.tokens.push_back(selections[i]);
    if (i > 0) out.rendered += ' ';
    out.rendered += selections[i] + source.tokens[i].trailing;
  }
  out.rendered += source.terminal.empty() ? "." : source.terminal;
  return out;
}

TranslitSentence assemble_sentence(const std::map<std::string, std::string>& selections,
                                   const g2p::TokenizedSentence& source, Language lang) {
  std::vector<std::string> ordered;
  for (const auto& tok : source.tokens) {
    auto it = selections.find(g2p::normalize_word(tok.word));
    if (it == selections.end()) {
      throw Error(ErrorCategory::kNotFound, "missing selection for '" + tok.word + "'");
    }
    ordered.push_back(it->second);
  }
  return assemble_sentence(ordered, source, lang);
}

// ---------------------------------------------------------------- run plan

int RunPlan::total() const {
  int n = 0;
  for (const auto& [model, count] : models) n += count;
  return n;
}

const std::string& RunPlan::model_for(int run_index) const {
  int base = 0;
  for (const auto& [model, count] : models) {
    if (run_index < base + count) return model;
    base += count;
  }
  throw Error(ErrorCategory::kInvalidArgument,
              "run index " + std::to_string(run_index) + " outside the run plan");
}

RunPlan RunPlan::with_total(int runs) {
  if (runs < 1) throw Error(ErrorCategory::kInvalidArgument, "runs must be >= 1");
  RunPlan plan;
  plan.models = {{"gpt-3.5-turbo", (runs + 1) / 2}};
  if (runs / 2 > 0) plan.models.emplace_back("gpt-4o", runs / 2);
  return plan;
}

// ---------------------------------------------------------------- orchestration

Transliterator::Transliterator(const g2p::Lexicon& lexicon, gateway::LlmService& llm,
                               TransliteratorConfig cfg)
    : lexicon_(lexicon), llm_(llm), cfg_(std::move(cfg)) {
  cfg_.weights.validate();
  if (cfg_.plan.total() < 1) {
    throw Error(ErrorCategory::kInvalidArgument, "run plan has no runs");
  }
}

void Transliterator::persist(const std::string& audit_key, Language lang,
                             const gateway::LlmRequest& req, const TranslitRun* run,
                             const std::string& error) const {
  if (!cfg_.runs_dir) return;
  std::string model = req.model_id;
  std::replace(model.begin(), model.end(), '/', '_');
  const fs::path path = *cfg_.runs_dir / audit_key / std::string(language_code(lang)) /
                        (model + "_" + std::to_string(req.run_index) + ".json");
  json doc = {{"model_id", req.model_id},
              {"run_index", req.run_index},
              {"request_digest", req.digest()},
              {"params", req.params}};
  if (run) doc["run"] = run->to_json();
  if (!error.empty()) doc["error"] = error;
  gateway::write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<TranslitRun> Transliterator::execute_runs(
    const std::vector<g2p::PhonemeSequence>& words, Language lang,
    const std::string& audit_key) {
  const std::vector<g2p::PhonemeSequence> uniq = unique_words(words);
  const std::string prompt = build_prompt(uniq, lang, cfg_.few_shots);
  std::vector<std::string> expected;
  for (const auto& w : uniq) expected.push_back(w.word);

  const int n = cfg_.plan.total();
  auto one = [&](int idx) -> TranslitRun {
    gateway::LlmRequest req{cfg_.plan.model_for(idx), prompt, cfg_.params, idx};
    try {
      TranslitRun run = parse_response(llm_.complete(req), expected, lang);
      run.model_id = req.model_id;
      run.run_index = idx;
      persist(audit_key, lang, req, &run, "");
      return run;
    } catch (const Error& e) {
      persist(audit_key, lang, req, nullptr, e.what());
      throw;
    }
  };

  std::vector<std::future<TranslitRun>> futures;
  for (int i = 0; i < n; ++i) {
    futures.push_back(std::async(cfg_.parallel ? std::launch::async : std::launch::deferred,
                                 one, i));
  }
  std::vector<TranslitRun> runs;
  std::exception_ptr first_error;
  for (auto& f : futures) {
    try {
      runs.push_back(f.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (runs.empty()) std::rethrow_exception(first_error);
  return runs;
}

std::string Transliterator::article(ArticleKey key, Language lang) {
  std::lock_guard<std::mutex> lock(articles_mu_);
  auto it = articles_.find({lang, key});
  if (it != articles_.end()) return it->second;
  const g2p::PhonemeSequence word = article_phonemes(key);
  auto runs = execute_runs({word}, lang,
                           "article_" + std::string(article_key_name(key)));
  auto ranking = aggregate_candidates(runs, {word}, lang, cfg_.weights);
  const std::string top = ranking.front().ranking.front().text;
  articles_[{lang, key}] = top;
  return top;
}

TranslitSentence Transliterator::transliterate(std::string_view text, Language lang) {
  const g2p::TokenizedSentence source = g2p::tokenize_sentence(text);
  if (source.tokens.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "sentence has no words");
  }
  const size_t n = source.tokens.size();
  std::vector<std::optional<g2p::PhonemeSequence>> phon(n);
  std::vector<g2p::PhonemeSequence> content;
  std::vector<std::string> oov;
  for (size_t i = 0; i < n; ++i) {
    if (is_article(source.tokens[i].word)) continue;
    try {
      phon[i] = g2p::phonemize_word(lexicon_, source.tokens[i].word);
      content.push_back(*phon[i]);
    } catch (const OovError&) {
      oov.push_back(source.tokens[i].word);
    }
  }
  if (!oov.empty()) throw OovError(oov);

  std::map<std::string, const TokenRanking*> by_word;
  std::vector<TokenRanking> rankings;
  if (!content.empty()) {
    const std::string audit_key = sha256_hex(text).substr(0, 16);
    auto runs = execute_runs(content, lang, audit_key);
    rankings = aggregate_candidates(runs, content, lang, cfg_.weights);
    for (const auto& r : rankings) by_word[g2p::normalize_word(r.word.word)] = &r;
  }

  std::vector<std::string> selections(n);
  json provenance = json::array();
  for (size_t i = 0; i < n; ++i) {
    const std::string& word = source.tokens[i].word;
    json entry = {{"word", word}};
    if (!phon[i]) {
      ArticleKey key = (i + 1 < n && phon[i + 1]) ? resolve_article(word, *phon[i + 1])
                                                  : default_article(word);
      selections[i] = article(key, lang);
      entry["article"] = std::string(article_key_name(key));
      entry["phonemes"] = article_phonemes(key).render();
    } else {
      const TokenRanking& r = *by_word.at(g2p::normalize_word(word));
      selections[i] = r.ranking.front().text;
      entry["phonemes"] = phon[i]->render();
      json table = json::array();
      for (const auto& c : r.ranking) {
        table.push_back({{"candidate", c.text},
                         {"score", c.score},
                         {"frequency", c.frequency},
                         {"similarity", c.similarity}});
      }
      entry["scores"] = table;
    }
    provenance.push_back(entry);
  }
  TranslitSentence out = assemble_sentence(selections, source, lang);
  out.provenance = provenance;
  return out;
}

}  // namespace accentkit::transliterator
