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

#include "accentkit/pipeline.h"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "accentkit/digest.h"
#include "accentkit/error.h"
#include "accentkit/g2p.h"
#include "accentkit/text.h"

namespace accentkit::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const json& j, const char* key, const fs::path& base, fs::path fallback = {}) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  fs::path p = j[key].get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

struct Selection {
  std::vector<corpus::Transcript> transcripts;
  corpus::SplitAssignment splits;
};

Selection select(const PipelineConfig& cfg) {
  Selection s;
  auto all = corpus::load_transcripts(cfg.transcripts);
  if (cfg.augment) {
    s.transcripts = corpus::select_augmentation(all, cfg.augment->max_words, cfg.augment->count,
                                                cfg.augment->seed);
    s.splits.seed = cfg.augment->seed;
    for (const auto& t : s.transcripts) s.splits.train.push_back(t.id);
  } else {
    std::vector<std::string> ids;
    for (const auto& t : all) ids.push_back(t.id);
    s.splits = corpus::split_transcripts(ids, cfg.split, cfg.split_seed);
    s.transcripts = std::move(all);
  }
  return s;
}

std::string accent_of(transliterator::Language lang) {
  return text::ascii_lower(transliterator::language_name(lang));
}

std::vector<transliterator::Language> languages(const PipelineConfig& cfg) {
  std::vector<transliterator::Language> out;
  for (const auto& l : cfg.languages) out.push_back(transliterator::parse_language(l));
  return out;
}

transliterator::FewShots few_shots(const PipelineConfig& cfg) {
  if (cfg.few_shots.empty()) return {};
  return transliterator::FewShots::load(cfg.few_shots);
}

}  // namespace

// ---------------------------------------------------------------- config

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  try {
    PipelineConfig c;
    c.transcripts = resolve(j, "transcripts", base);
    c.speakers = resolve(j, "speakers", base);
    c.lexicon = resolve(j, "lexicon", base);
    c.few_shots = resolve(j, "few_shots", base);
    c.output = resolve(j, "output", base, c.output);
    c.cache_root = resolve(j, "cache_root", base, c.cache_root);
    c.asset_root = resolve(j, "asset_root", base, c.asset_root);
    c.languages = j.value("languages", std::vector<std::string>{});
    if (j.contains("runs")) {
      c.plan.models.clear();
      for (const auto& r : j["runs"]) {
        c.plan.models.emplace_back(r.at("model").get<std::string>(), r.at("count").get<int>());
      }
    }
    if (j.contains("weights")) c.weights = j["weights"].get<std::array<double, 3>>();
    if (j.contains("split")) {
      const auto& s = j["split"];
      c.split.train = s.value("train", c.split.train);
      c.split.val = s.value("val", c.split.val);
      c.split.test = s.value("test", c.split.test);
      c.split_seed = s.value("seed", c.split_seed);
    }
    if (j.contains("augment") && !j["augment"].is_null()) {
      const auto& a = j["augment"];
      AugmentConfig ac;
      ac.count = a.value("count", ac.count);
      ac.max_words = a.value("max_words", ac.max_words);
      ac.seed = a.value("seed", ac.seed);
      c.augment = ac;
    }
    c.source_accent = j.value("source_accent", c.source_accent);
    if (j.contains("llm")) {
      c.llm_base_url = j["llm"].value("base_url", "");
      c.llm_params = j["llm"].value("params", json::object());
      c.max_in_flight = j["llm"].value("max_in_flight", c.max_in_flight);
    }
    if (j.contains("tts")) {
      c.tts_base_url = j["tts"].value("base_url", "");
      c.tts_provider = j["tts"].value("provider", c.tts_provider);
      c.tts_params = j["tts"].value("params", json::object());
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, std::string("pipeline config: ") + e.what());
  }
}

json PipelineConfig::to_json() const {
  json runs = json::array();
  for (const auto& [m, n] : plan.models) runs.push_back({{"model", m}, {"count", n}});
  json j{{"transcripts", transcripts.string()},
         {"speakers", speakers.string()},
         {"lexicon", lexicon.string()},
         {"few_shots", few_shots.string()},
         {"output", output.string()},
         {"cache_root", cache_root.string()},
         {"asset_root", asset_root.string()},
         {"languages", languages},
         {"runs", runs},
         {"weights", weights},
         {"split",
          {{"train", split.train}, {"val", split.val}, {"test", split.test}, {"seed", split_seed}}},
         {"source_accent", source_accent},
         {"llm", {{"base_url", llm_base_url}, {"params", llm_params}, {"max_in_flight", max_in_flight}}},
         {"tts", {{"base_url", tts_base_url}, {"provider", tts_provider}, {"params", tts_params}}}};
  j["augment"] = augment ? json{{"count", augment->count},
                                {"max_words", augment->max_words},
                                {"seed", augment->seed}}
                         : json(nullptr);
  return j;
}

json PipelineConfig::identity_json() const {
  json j = to_json();
  j["llm"].erase("base_url");
  j["llm"].erase("max_in_flight");
  j["tts"].erase("base_url");
  return j;
}

std::string PipelineConfig::hash() const { return sha256_hex(identity_json().dump()); }

void PipelineConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCategory::kInvalidArgument, m); };
  if (transcripts.empty()) bad("config: transcripts is required");
  if (speakers.empty()) bad("config: speakers is required");
  if (languages.empty()) bad("config: at least one language is required");
  std::set<std::string> seen;
  for (const auto& l : languages) {
    const auto lang = transliterator::parse_language(l);
    if (!seen.insert(std::string(transliterator::language_code(lang))).second) {
      bad("config: duplicate language " + l);
    }
  }
  if (plan.models.empty() || plan.total() < 1) bad("config: run plan is empty");
  for (const auto& [m, n] : plan.models) {
    if (m.empty() || n < 1) bad("config: each run entry needs a model and count >= 1");
  }
  transliterator::RankWeights{weights}.validate();
  if (augment && (augment->count == 0 || augment->max_words == 0)) {
    bad("config: augment needs count >= 1 and max_words >= 1");
  }
  if (max_in_flight < 1) bad("config: max_in_flight must be >= 1");
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(gateway::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kParse, path.string() + ": " + e.what());
  }
  PipelineConfig c = PipelineConfig::from_json(j, path.parent_path());
  if (const char* v = std::getenv("LLM_BASE_URL"); v && *v) c.llm_base_url = v;
  if (const char* v = std::getenv("TTS_BASE_URL"); v && *v) c.tts_base_url = v;
  return c;
}

gateway::LlmConfig llm_config(const PipelineConfig& cfg) {
  gateway::LlmConfig c;
  c.mode = gateway::mode_from_env();
  c.cache_root = cfg.cache_root;
  c.endpoint = gateway::llm_endpoint_from_env();
  if (!cfg.llm_base_url.empty()) c.endpoint.base_url = cfg.llm_base_url;
  c.endpoint.max_in_flight = cfg.max_in_flight;
  return c;
}

gateway::TtsConfig tts_config(const PipelineConfig& cfg) {
  gateway::TtsConfig c;
  c.mode = gateway::mode_from_env();
  c.cache_root = cfg.cache_root;
  c.asset_root = cfg.asset_root;
  c.provider = cfg.tts_provider;
  c.endpoint = gateway::tts_endpoint_from_env();
  if (!cfg.tts_base_url.empty()) c.endpoint.base_url = cfg.tts_base_url;
  c.endpoint.max_in_flight = cfg.max_in_flight;
  return c;
}

// ---------------------------------------------------------------- plan

json Plan::to_json() const {
  return {{"transcripts", transcripts},
          {"languages", languages},
          {"speakers", speakers},
          {"prompts", prompts},
          {"runs_per_prompt", runs_per_prompt},
          {"llm_calls", llm_calls},
          {"article_prompts", article_prompts},
          {"article_llm_calls", article_llm_calls},
          {"llm_calls_total", llm_calls + article_llm_calls},
          {"utterances", utterances},
          {"tts_calls", tts_calls},
          {"oov_sentences", oov_sentences},
          {"lexicon_checked", lexicon_checked}};
}

Plan make_plan(const PipelineConfig& cfg) {
  cfg.validate();
  const Selection sel = select(cfg);
  const auto speakers = corpus::load_speakers(cfg.speakers);
  const auto langs = languages(cfg);
  std::optional<g2p::Lexicon> lex;
  if (!cfg.lexicon.empty()) lex = g2p::Lexicon::load(cfg.lexicon, g2p::LexiconFormat::kCmuDict);

  Plan p;
  p.transcripts = sel.transcripts.size();
  p.languages = langs.size();
  p.speakers = speakers.size();
  p.runs_per_prompt = cfg.plan.total();
  p.lexicon_checked = lex.has_value();

  std::size_t sentence_prompts = 0;
  std::set<transliterator::ArticleKey> keys;
  std::set<std::string> usable;
  for (const auto& t : sel.transcripts) {
    const auto tok = g2p::tokenize_sentence(t.text);
    const auto n = tok.tokens.size();
    std::vector<std::optional<g2p::PhonemeSequence>> phon(n);
    bool content = false, oov = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (transliterator::is_article(tok.tokens[i].word)) continue;
      content = true;
      if (!lex) continue;
      try {
        phon[i] = g2p::phonemize_word(*lex, tok.tokens[i].word);
      } catch (const OovError&) {
        oov = true;
      }
    }
    if (oov) {
      ++p.oov_sentences;
      continue;
    }
    if (n == 0) continue;
    usable.insert(t.id);
    if (content) ++sentence_prompts;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& w = tok.tokens[i].word;
      if (!transliterator::is_article(w)) continue;
      keys.insert(i + 1 < n && phon[i + 1] ? transliterator::resolve_article(w, *phon[i + 1])
                                           : transliterator::default_article(w));
    }
  }
  p.prompts = sentence_prompts * langs.size();
  p.llm_calls = p.prompts * static_cast<std::size_t>(p.runs_per_prompt);
  p.article_prompts = keys.size() * langs.size();
  p.article_llm_calls = p.article_prompts * static_cast<std::size_t>(p.runs_per_prompt);

  for (const auto& s : speakers) {
    for (const auto& t : sel.transcripts) {
      if (!usable.count(t.id)) continue;
      bool recorded = false;
      if (s.recordings_dir) {
        recorded = fs::is_regular_file(cfg.asset_root / *s.recordings_dir / (t.id + ".wav"));
      }
      p.utterances += langs.size();
      p.tts_calls += langs.size() * (recorded ? 1 : 2);
    }
  }
  return p;
}

// ---------------------------------------------------------------- run

json Outcome::summary() const {
  json f = json::array();
  for (const auto& x : failures) {
    f.push_back({{"transcript_id", x.transcript_id},
                 {"language", x.language},
                 {"error", x.category},
                 {"message", x.message}});
  }
  return {{"utterances", manifest.utterances.size()},
          {"failures", f},
          {"tts_requests", tts_requests},
          {"validation", report.to_json()}};
}

Outcome run(const PipelineConfig& cfg, Services services) {
  cfg.validate();
  if (cfg.lexicon.empty()) throw Error(ErrorCategory::kInvalidArgument, "config: lexicon is required");
  const Selection sel = select(cfg);
  const auto speakers = corpus::load_speakers(cfg.speakers);
  const auto langs = languages(cfg);
  const auto lex = g2p::Lexicon::load(cfg.lexicon, g2p::LexiconFormat::kCmuDict);

  transliterator::TransliteratorConfig tcfg;
  tcfg.plan = cfg.plan;
  tcfg.weights = transliterator::RankWeights{cfg.weights};
  tcfg.few_shots = few_shots(cfg);
  tcfg.params = cfg.llm_params;
  tcfg.runs_dir = cfg.output / "runs";
  transliterator::Transliterator tr(lex, services.llm, tcfg);

  Outcome out;
  std::map<std::pair<std::string, std::string>, std::string> rendered;
  for (auto lang : langs) {
    const std::string accent = accent_of(lang);
    std::string lines;
    for (const auto& t : sel.transcripts) {
      try {
        auto s = tr.transliterate(t.text, lang);
        rendered[{accent, t.id}] = s.rendered;
        json rec = s.to_json();
        rec["transcript_id"] = t.id;
        rec["text"] = t.text;
        lines += rec.dump() + "\n";
      } catch (const Error& e) {
        out.failures.push_back(
            {t.id, accent, std::string(category_name(e.category())), e.what()});
      }
    }
    gateway::write_file_atomic(
        cfg.output / "transliterations" /
            (std::string(transliterator::language_code(lang)) + ".jsonl"),
        lines);
  }

  std::vector<std::string> accents;
  for (auto lang : langs) accents.push_back(accent_of(lang));
  auto planned = corpus::plan_utterances(speakers, sel.transcripts, sel.splits, accents,
                                         cfg.source_accent);
  std::vector<corpus::PairedUtterance> utts;
  for (auto& u : planned) {
    auto it = rendered.find({u.target_accent, u.transcript_id});
    if (it == rendered.end()) continue;
    u.target_text = it->second;
    utts.push_back(std::move(u));
  }

  json provenance{{"tool_version", corpus::kToolVersion},
                  {"config_hash", cfg.hash()},
                  {"config", cfg.identity_json()}};
  auto built = corpus::build_manifest(speakers, sel.splits, std::move(utts), cfg.output,
                                      provenance, false);
  out.manifest = std::move(built.manifest);
  if (services.tts) {
    out.tts_requests = corpus::synthesize_manifest(out.manifest, *services.tts, cfg.output,
                                                   {cfg.asset_root, cfg.tts_params});
  }
  out.report = corpus::validate_manifest(out.manifest, cfg.output, services.tts != nullptr);
  out.manifest.save(cfg.output / "manifest.json");
  gateway::write_file_atomic(cfg.output / "report.json", out.summary().dump(2) + "\n");
  return out;
}

}  // namespace accentkit::pipeline
