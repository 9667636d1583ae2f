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


// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Independent of GoogleTest.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "accentkit/cli.h"
#include "accentkit/corpus.h"
#include "accentkit/evalkit.h"
#include "accentkit/g2p.h"
#include "accentkit/gateway.h"
#include "accentkit/mushra.h"
#include "accentkit/romanizer.h"
#include "accentkit/text.h"
#include "accentkit/transliterator.h"
#include "accentkit/vq.h"
#include "edit_oracle.h"
#include "mock_server.h"
#include "pipeline_fixtures.h"
#include "test_util.h"
#include "translit_fixtures.h"

namespace {

using namespace accentkit;
using nlohmann::json;
using testing::asset_dir;
using testing::slurp;
using testing::test_data_dir;

struct Failed {
  std::string why;
};

void require(bool cond, const std::string& why) {
  if (!cond) throw Failed{why};
}

const g2p::Lexicon& lexicon() {
  static const g2p::Lexicon lex =
      g2p::Lexicon::load(asset_dir() / "lexicon/mini.dict", g2p::LexiconFormat::kCmuDict);
  return lex;
}

std::vector<g2p::PhonemeSequence> words_of(std::initializer_list<const char*> ws) {
  std::vector<g2p::PhonemeSequence> out;
  for (const char* w : ws) out.push_back(g2p::phonemize_word(lexicon(), w));
  return out;
}

// ---------------------------------------------------------------- criteria

void romanization_fixtures() {
  require(romanizer::romanize_hangul("액센트").text == "aegsenteu", "hangul");
  require(romanizer::romanize_katakana("アクセント").text == "akusento", "katakana");
  require(romanizer::romanize_devanagari("\u0905\u0915\u094D\u0938\u0947\u0902\u091F\u094D")
                  .text == "aksemt",
          "devanagari");
}

void hangul_bijection() {
  int n = 0;
  for (char32_t cp = 0xAC00; cp <= 0xD7A3; ++cp, ++n) {
    require(romanizer::compose_hangul(romanizer::decompose_hangul(cp)) == cp,
            "round trip failed at U+" + std::to_string(static_cast<unsigned>(cp)));
  }
  require(n == 11172, "syllable count " + std::to_string(n));
  require(romanizer::decompose_hangul(U'가') == romanizer::JamoTriple{0, 0, 0}, "가");
  require(romanizer::decompose_hangul(U'액') == romanizer::JamoTriple{11, 1, 1}, "액");
}

void golden_prompt() {
  using transliterator::Language;
  const std::string golden = slurp(asset_dir() / "prompts/lets_go_japanese.txt");
  require(!golden.empty(), "golden prompt missing");
  require(transliterator::build_prompt(words_of({"Let's", "go"}), Language::kJapanese,
                                       transliterator::FewShots{"Hindi", ""}) == golden,
          "prompt differs from golden");

  const std::string response = slurp(test_data_dir() / "lets_go_response.txt");
  const auto run = transliterator::parse_response(response, {"Let's", "go"}, Language::kJapanese);
  const auto* lets = run.find("Let's");
  require(lets != nullptr, "Let's not parsed");
  require(lets->similarity_order[0] == "レッツ", "Let's top-ranked " + lets->similarity_order[0]);
  const auto ranked =
      transliterator::aggregate_candidates({run}, words_of({"Let's", "go"}), Language::kJapanese);
  require(ranked[0].ranking[0].text == "レッツ", "aggregate top " + ranked[0].ranking[0].text);

  testing::FakeLlm llm([&](const gateway::LlmRequest&) { return response; });
  transliterator::TransliteratorConfig cfg;
  cfg.few_shots = transliterator::FewShots{"Hindi", ""};
  transliterator::Transliterator t(lexicon(), llm, cfg);
  const auto s = t.transliterate("Let's go", Language::kJapanese);
  require(s.rendered == "レッツ ゴー.", "assembled " + s.rendered);
}

void aggregation_oracle() {
  using transliterator::Language;
  std::mt19937 rng(7);
  for (int set = 0; set < 200; ++set) {
    auto rs = testing::random_run_set(rng, lexicon());
    const auto got = transliterator::aggregate_candidates(rs.runs, rs.words, Language::kJapanese);
    const auto want =
        testing::brute_force_rankings(rs.runs, rs.words, Language::kJapanese, {3, 2, 1});
    require(got.size() == want.size(), "token count");
    for (std::size_t i = 0; i < got.size(); ++i) {
      require(got[i].ranking.size() == want[i].size(), "ranking length, set " + std::to_string(set));
      for (std::size_t k = 0; k < want[i].size(); ++k) {
        require(got[i].ranking[k].text == want[i][k].first &&
                    got[i].ranking[k].score == want[i][k].second,
                "oracle mismatch, set " + std::to_string(set));
      }
    }
    for (int s = 0; s < 100; ++s) {
      auto shuffled = rs.runs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto again =
          transliterator::aggregate_candidates(shuffled, rs.words, Language::kJapanese);
      for (std::size_t i = 0; i < got.size(); ++i) {
        require(again[i].ranking[0].text == got[i].ranking[0].text,
                "top-1 changed under permutation, set " + std::to_string(set));
      }
    }
  }
}

template <typename T>
void check_edits(const std::vector<T>& r, const std::vector<T>& h, const evalkit::EditCounts& e) {
  testing::BruteForce<T> bf{r, h, {}};
  const auto [cost, triples] = bf.solve(0, 0);
  require(e.edits() == cost, "edit cost differs from oracle");
  require(e.ref_length == r.size(), "reference length");
  require(triples.count({e.substitutions, e.deletions, e.insertions}) == 1,
          "(S,D,I) not a minimal breakdown");
}

void wer_cer_oracle() {
  std::mt19937 rng(11);
  const std::vector<std::string> vocab = {"a", "b", "c", "let's", "go"};
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> r(1 + rng() % 12), h(rng() % 13);
    for (auto& w : r) w = vocab[rng() % vocab.size()];
    for (auto& w : h) w = vocab[rng() % vocab.size()];
    check_edits(r, h, evalkit::wer(text::join(r, " "), text::join(h, " ")));
  }
  const std::u32string alphabet = U"abcー";
  for (int t = 0; t < 1000; ++t) {
    std::vector<char32_t> r(1 + rng() % 12), h(rng() % 13);
    for (auto& c : r) c = alphabet[rng() % alphabet.size()];
    for (auto& c : h) c = alphabet[rng() % alphabet.size()];
    check_edits(r, h,
                evalkit::cer(text::encode_utf8({r.begin(), r.end()}),
                             text::encode_utf8({h.begin(), h.end()})));
  }
  const auto e = evalkit::wer("let's go", "lets go home");
  require(e == evalkit::EditCounts{1, 0, 1, 2}, "(S,D,I,N) for the worked example");
  require(e.rate() == 1.0, "rate for the worked example");
}

void corpus_arithmetic() {
  std::vector<std::string> ids;
  for (int i = 0; i < 1132; ++i) ids.push_back("u" + std::to_string(i));
  const auto split = corpus::split_transcripts(ids, {932, 100, 100}, 0);
  require(split.train.size() == 932 && split.val.size() == 100 && split.test.size() == 100,
          "split sizes");

  std::vector<corpus::Transcript> pool;
  for (int i = 0; i < 9000; ++i) {
    std::string words;
    for (int w = 0; w <= i % 20; ++w) words += (w ? " w" : "w") + std::to_string(w);
    pool.push_back({"a" + std::to_string(i), words});
  }
  const auto picked = corpus::select_augmentation(pool, 15, 4500, 1);
  require(picked.size() == 4500, "augmentation count " + std::to_string(picked.size()));
  for (const auto& t : picked) {
    require(text::split_whitespace(t.text).size() < 15, "long transcript selected: " + t.id);
  }

  testing::PipelineFixture fx;
  testing::spit(fx.dir / "data/transcripts.tsv", testing::synthetic_transcripts(1132));
  json j = fx.config_json();
  j.erase("split");
  const auto config = fx.write_config(j);
  testing::MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(testing::chat_reply("{}"), "application/json");
  });
  ::setenv("ACCENTKIT_LIVE", "1", 1);
  ::setenv("LLM_BASE_URL", server.url().c_str(), 1);
  std::ostringstream out, err;
  const int code = cli::dispatch({"pipeline", "--config", config.string(), "--dry-run"}, out, err);
  ::unsetenv("ACCENTKIT_LIVE");
  ::unsetenv("LLM_BASE_URL");
  require(code == 0, "dry run exit " + std::to_string(code) + ": " + err.str());
  const json plan = json::parse(out.str());
  require(plan["prompts"] == 1132, "planned prompts " + plan["prompts"].dump());
  require(plan["llm_calls"] == 6792, "planned LLM calls " + plan["llm_calls"].dump());
  require(server.calls() == 0, "dry run touched the network");
}

void vq_properties() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 20 + rng() % 60, dim = 1 + rng() % 4, k = 1 + rng() % 8;
    vq::Matrix m(n, dim);
    for (auto& v : m.data) v = normal(rng);
    vq::KMeansOptions opts;
    opts.k = k;
    opts.seed = inst;
    opts.threads = 1;
    const auto cb = vq::fit_kmeans(m, opts);
    for (std::size_t i = 1; i < cb.distortion_history.size(); ++i) {
      const double prev = cb.distortion_history[i - 1], cur = cb.distortion_history[i];
      require(cur <= prev * (1 + 1e-12), "distortion rose in instance " + std::to_string(inst));
    }
  }

  vq::Matrix m(50, 3);
  for (auto& v : m.data) v = normal(rng);
  vq::KMeansOptions one;
  one.k = 1;
  const auto cb = vq::fit_kmeans(m, one);
  for (std::size_t d = 0; d < 3; ++d) {
    double mean = 0;
    for (std::size_t i = 0; i < 50; ++i) mean += m.row(i)[d];
    mean /= 50;
    require(std::abs(cb.centroids.row(0)[d] - mean) <= 1e-9, "k=1 centroid is not the mean");
  }

  require(vq::dedup({5, 5, 3, 3, 3, 5}) == std::vector<int>{5, 3, 5}, "dedup example");

  vq::Matrix frames(2000, 8);
  for (auto& v : frames.data) v = normal(rng);
  vq::KMeansOptions big;
  big.k = 500;
  big.max_iters = 20;
  const auto book = vq::fit_kmeans(frames, big);
  require(book.centroids.rows == 500 && book.centroids.cols == 8, "codebook shape");
}

void metric_algebra() {
  const std::vector<double> a = {0.3, -1.2, 2.0, 0.7}, b = {1.1, 0.4, -0.5, 2.2};
  const double base = evalkit::cosine(a, b);
  for (double lambda : {0.5, 3.0}) {
    std::vector<double> s = a;
    for (auto& v : s) v *= lambda;
    require(std::abs(evalkit::cosine(s, b) - base) <= 1e-12, "cosine not scale invariant");
  }
  const std::vector<double> conv = {1, 2, 0.5}, acc = {0.9, 1.5, 1}, nat = {-1, 0.3, 2};
  const double d = evalkit::aecs_diff(conv, acc, nat);
  require(d != 0 && evalkit::aecs_diff(conv, nat, acc) == -d, "sign does not flip under swap");
  const std::vector<double> c = {1, 0, 0}, ortho = {0, 1, 0};
  require(std::abs(evalkit::aecs_diff(c, c, ortho) - 1.0) <= 1e-12, "orthogonal native case");
}

void mushra_stats() {
  const std::vector<double> scores = {80, 70, 90};
  const auto st = mushra::compute_stats(scores);
  require(std::abs(st.mean - 80.0) < 1e-9, "mean");
  require(std::abs(st.ci_half_width - 24.84) <= 0.01,
          "half width " + evalkit::format_fixed(st.ci_half_width, 4));
  const std::vector<double> flat = {50, 50, 50, 50};
  require(mushra::compute_stats(flat).rendered() == "50.00 ± 0.00", "constant scores");
  require(std::regex_match(st.rendered(), std::regex(R"(\d+\.\d{2} ± \d+\.\d{2})")),
          "rendering shape " + st.rendered());
}

void gateway_determinism() {
  using transliterator::Language;
  testing::TempDir dir;
  const std::string response = slurp(test_data_dir() / "lets_go_response.txt");
  testing::MockServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(testing::chat_reply(response), "application/json");
  });
  gateway::LlmConfig live_cfg;
  live_cfg.mode = gateway::Mode::kLive;
  live_cfg.cache_root = dir / "cache";
  live_cfg.endpoint = gateway::llm_endpoint_from_env();
  live_cfg.endpoint.base_url = server.url();
  live_cfg.endpoint.api_key = "k";
  transliterator::TransliteratorConfig cfg;
  cfg.few_shots = transliterator::FewShots{"Hindi", ""};

  std::string first;
  {
    gateway::LlmGateway gw(live_cfg);
    transliterator::Transliterator t(lexicon(), gw, cfg);
    first = t.transliterate("Let's go", Language::kJapanese).to_json().dump();
  }
  const int after_first = server.calls();
  require(after_first == 6, "first invocation made " + std::to_string(after_first) + " calls");

  auto replay_cfg = live_cfg;
  replay_cfg.mode = gateway::Mode::kReplayOnly;
  gateway::LlmGateway replay(replay_cfg);
  transliterator::Transliterator t(lexicon(), replay, cfg);
  const std::string second = t.transliterate("Let's go", Language::kJapanese).to_json().dump();
  require(server.calls() == after_first, "second invocation touched the network");
  require(replay.stats().network_calls == 0, "replay gateway reports network calls");
  require(second == first, "replay output differs");

  testing::MockServer slow(
      [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(testing::chat_reply(req.body.substr(0, 8)), "application/json");
      },
      std::chrono::milliseconds(20));
  auto burst_cfg = live_cfg;
  burst_cfg.cache_root = dir / "burst";
  burst_cfg.endpoint.base_url = slow.url();
  burst_cfg.endpoint.max_in_flight = 4;
  gateway::LlmGateway gw(burst_cfg);
  std::vector<std::future<std::string>> futures;
  for (int i = 0; i < 50; ++i) {
    futures.push_back(std::async(std::launch::async, [&gw, i] {
      return gw.complete({"m", "burst", json::object(), i});
    }));
  }
  for (auto& f : futures) require(!f.get().empty(), "empty burst response");
  require(slow.calls() == 50, "burst calls " + std::to_string(slow.calls()));
  require(slow.max_in_flight() <= 4, "in-flight peak " + std::to_string(slow.max_in_flight()));
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<void()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"AC-1", "romanization fixtures (Hangul, Katakana, Devanagari)", romanization_fixtures},
      {"AC-2", "Hangul decompose/compose bijection over all syllables", hangul_bijection},
      {"AC-3", "golden Japanese prompt, response parsing and assembly", golden_prompt},
      {"AC-4", "candidate aggregation matches brute force, stable under run order",
       aggregation_oracle},
      {"AC-5", "WER/CER agree with brute-force alignment", wer_cer_oracle},
      {"AC-6", "split sizes, augmentation selection, dry-run call count", corpus_arithmetic},
      {"AC-7", "k-means distortion, centroid, dedup, codebook shape", vq_properties},
      {"AC-8", "cosine scale invariance and AECS sign algebra", metric_algebra},
      {"AC-9", "MUSHRA mean and 95% confidence interval", mushra_stats},
      {"AC-10", "replay determinism and in-flight cap", gateway_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      c.fn();
    } catch (const Failed& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    if (why.empty()) {
      std::printf("[PASS] %-5s %s (%.0f ms)\n", c.id, c.name, ms);
    } else {
      ++failures;
      std::printf("[FAIL] %-5s %s: %s\n", c.id, c.name, why.c_str());
    }
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
