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

#include "accentkit/cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <json.hpp>

#include "accentkit/corpus.h"
#include "accentkit/error.h"
#include "accentkit/evalkit.h"
#include "accentkit/g2p.h"
#include "accentkit/gateway.h"
#include "accentkit/mushra.h"
#include "accentkit/mushra_server.h"
#include "accentkit/phonosim.h"
#include "accentkit/pipeline.h"
#include "accentkit/romanizer.h"
#include "accentkit/text.h"
#include "accentkit/transliterator.h"
#include "accentkit/vq.h"

namespace accentkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

std::string fixed(double v, int digits) { return evalkit::format_fixed(v, digits); }

// ---------------------------------------------------------------- commands

void add_phonemize(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("phonemize", "Print IPA for each word of a sentence");
  auto text = std::make_shared<std::string>();
  auto lexicon = std::make_shared<std::string>();
  cmd->add_option("text", *text, "English text")->required();
  cmd->add_option("--lexicon", *lexicon, "CMUdict-format pronunciation dictionary")->required();
  cmd->callback([=, &action] {
    action = [=] {
      const auto lex = g2p::Lexicon::load(*lexicon, g2p::LexiconFormat::kCmuDict);
      const auto sent = g2p::phonemize_sentence(lex, *text);
      for (const auto& t : sent.tokens) {
        if (t.phonemes) io.out << t.token.word << '\t' << t.phonemes->render() << '\n';
      }
      if (!sent.oov.empty()) throw OovError(sent.oov);
    };
  });
}

void add_romanize(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("romanize", "Romanize Hangul, Katakana or Devanagari text");
  auto script = std::make_shared<std::string>();
  auto text = std::make_shared<std::string>();
  cmd->add_option("--script", *script, "ko | ja | hi")->required();
  cmd->add_option("text", *text, "text in the target script")->required();
  cmd->callback([=, &action] {
    action = [=] {
      const auto r = romanizer::romanize(romanizer::parse_script(*script), *text);
      io.out << r.text << '\n';
      for (const auto& issue : r.issues) io.err << "warning: " << issue << '\n';
    };
  });
}

void add_phonosim(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("phonosim", "Phonetic similarity of IPA and a romanization");
  auto ipa = std::make_shared<std::string>();
  auto roman = std::make_shared<std::string>();
  cmd->add_option("--ipa", *ipa, "rendered IPA, e.g. ɡˈoʊ")->required();
  cmd->add_option("--roman", *roman, "romanized candidate")->required();
  cmd->callback([=, &action] {
    action = [=] {
      const auto a = phonosim::keys_from_ipa_text(*ipa);
      const auto b = phonosim::keys_from_roman(*roman);
      io.out << fixed(phonosim::similarity(a, b), 4) << '\n';
    };
  });
}

struct TranslitArgs {
  std::string text, lang, lexicon, few_shots, cache = "cache", runs_dir;
  int runs = 6;
  bool json_out = false;
};

void add_transliterate(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("transliterate", "Transliterate English text into a target script");
  auto a = std::make_shared<TranslitArgs>();
  cmd->add_option("--text", a->text, "English sentence")->required();
  cmd->add_option("--lang", a->lang, "hindi | japanese | korean | mandarin")->required();
  cmd->add_option("--lexicon", a->lexicon, "pronunciation dictionary")->required();
  cmd->add_option("--runs", a->runs, "total LLM runs, split across the default models")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--few-shots", a->few_shots, "few-shot example file");
  cmd->add_option("--cache", a->cache, "LLM cache directory");
  cmd->add_option("--runs-dir", a->runs_dir, "persist raw runs under this directory");
  cmd->add_flag("--json", a->json_out, "print the sentence with provenance as JSON");
  cmd->callback([=, &action] {
    action = [=] {
      const auto lang = transliterator::parse_language(a->lang);
      const auto lex = g2p::Lexicon::load(a->lexicon, g2p::LexiconFormat::kCmuDict);
      gateway::LlmConfig lc;
      lc.mode = gateway::mode_from_env();
      lc.cache_root = a->cache;
      lc.endpoint = gateway::llm_endpoint_from_env();
      gateway::LlmGateway llm(lc);
      transliterator::TransliteratorConfig tc;
      tc.plan = transliterator::RunPlan::with_total(a->runs);
      if (!a->few_shots.empty()) tc.few_shots = transliterator::FewShots::load(a->few_shots);
      if (!a->runs_dir.empty()) tc.runs_dir = a->runs_dir;
      transliterator::Transliterator tr(lex, llm, tc);
      const auto s = tr.transliterate(a->text, lang);
      if (a->json_out) {
        io.out << s.to_json().dump(2) << '\n';
      } else {
        io.out << s.rendered << '\n';
      }
    };
  });
}

void add_synth(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("synth", "Fill missing audio in a corpus manifest");
  auto manifest = std::make_shared<std::string>();
  auto root = std::make_shared<std::string>();
  auto assets = std::make_shared<std::string>(".");
  auto cache = std::make_shared<std::string>("cache");
  auto params = std::make_shared<std::string>("{}");
  cmd->add_option("--manifest", *manifest, "manifest.json")->required();
  cmd->add_option("--root", *root, "corpus root (default: manifest directory)");
  cmd->add_option("--assets", *assets, "asset root holding speakers/<id>/*.wav");
  cmd->add_option("--cache", *cache, "TTS cache directory");
  cmd->add_option("--params", *params, "provider parameters as JSON");
  cmd->callback([=, &action] {
    action = [=] {
      const fs::path mpath = *manifest;
      const fs::path corpus_root = root->empty() ? mpath.parent_path() : fs::path(*root);
      auto m = corpus::CorpusManifest::load(mpath);
      gateway::TtsConfig tc;
      tc.mode = gateway::mode_from_env();
      tc.cache_root = *cache;
      tc.asset_root = *assets;
      tc.endpoint = gateway::tts_endpoint_from_env();
      gateway::TtsGateway tts(tc);
      const int n = corpus::synthesize_manifest(m, tts, corpus_root,
                                                {*assets, json::parse(*params)});
      m.save(mpath);
      const auto report = corpus::validate_manifest(m, corpus_root);
      io.out << "synthesized " << n << " clips; " << report.issues.size() << " issues\n";
      if (!report.ok()) {
        io.out << report.to_json().dump(2) << '\n';
        throw Error(ErrorCategory::kIntegrity, "manifest validation failed");
      }
    };
  });
}

void print_outcome(Streams io, const pipeline::Outcome& o) {
  io.out << o.summary().dump(2) << '\n';
  if (!o.report.ok()) throw Error(ErrorCategory::kIntegrity, "manifest validation failed");
}

struct BuildArgs {
  std::string transcripts, speakers, langs, lexicon, out = "out", few_shots, cache = "cache",
                                                      assets = ".", split = "932,100,100";
  std::uint64_t seed = 0;
  std::size_t augment = 0, max_words = 15;
  int runs = 6;
  bool synth = false;
};

void add_build_dataset(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("build-dataset", "Transliterate transcripts and write a manifest");
  auto a = std::make_shared<BuildArgs>();
  cmd->add_option("--transcripts", a->transcripts, "transcript file or directory")->required();
  cmd->add_option("--speakers", a->speakers, "speakers JSON")->required();
  cmd->add_option("--langs", a->langs, "comma-separated target languages")->required();
  cmd->add_option("--lexicon", a->lexicon, "pronunciation dictionary")->required();
  cmd->add_option("--out", a->out, "output directory");
  cmd->add_option("--split", a->split, "train,val,test sizes");
  cmd->add_option("--seed", a->seed, "split / sampling seed");
  cmd->add_option("--augment", a->augment, "select this many short transcripts instead of splitting");
  cmd->add_option("--max-words", a->max_words, "augmentation keeps transcripts below this length");
  cmd->add_option("--runs", a->runs, "LLM runs per prompt")->check(CLI::PositiveNumber);
  cmd->add_option("--few-shots", a->few_shots, "few-shot example file");
  cmd->add_option("--cache", a->cache, "gateway cache directory");
  cmd->add_option("--assets", a->assets, "asset root");
  cmd->add_flag("--synth", a->synth, "also synthesize audio");
  cmd->callback([=, &action] {
    action = [=] {
      pipeline::PipelineConfig c;
      c.transcripts = a->transcripts;
      c.speakers = a->speakers;
      c.lexicon = a->lexicon;
      c.few_shots = a->few_shots;
      c.output = a->out;
      c.cache_root = a->cache;
      c.asset_root = a->assets;
      for (const auto& l : text::split(a->langs, ',')) {
        if (!text::trim(l).empty()) c.languages.emplace_back(text::trim(l));
      }
      c.plan = transliterator::RunPlan::with_total(a->runs);
      const auto sizes = text::split(a->split, ',');
      if (sizes.size() != 3) throw Error(ErrorCategory::kInvalidArgument, "--split needs train,val,test");
      try {
        c.split = {std::stoul(sizes[0]), std::stoul(sizes[1]), std::stoul(sizes[2])};
      } catch (const std::exception&) {
        throw Error(ErrorCategory::kInvalidArgument, "--split needs three integers");
      }
      c.split_seed = a->seed;
      if (a->augment > 0) c.augment = pipeline::AugmentConfig{a->augment, a->max_words, a->seed};
      gateway::LlmGateway llm(pipeline::llm_config(c));
      std::optional<gateway::TtsGateway> tts;
      if (a->synth) tts.emplace(pipeline::tts_config(c));
      print_outcome(io, pipeline::run(c, {llm, tts ? &*tts : nullptr}));
    };
  });
}

void add_pipeline(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("pipeline", "Run the whole corpus pipeline from a config file");
  auto config = std::make_shared<std::string>();
  auto dry = std::make_shared<bool>(false);
  auto no_synth = std::make_shared<bool>(false);
  cmd->add_option("--config", *config, "pipeline config JSON")->required();
  cmd->add_flag("--dry-run", *dry, "print the plan without any network access");
  cmd->add_flag("--no-synth", *no_synth, "stop after the manifest");
  cmd->callback([=, &action] {
    action = [=] {
      const auto c = pipeline::load_config(*config);
      if (*dry) {
        json plan = pipeline::make_plan(c).to_json();
        plan["config_hash"] = c.hash();
        plan["tool_version"] = corpus::kToolVersion;
        io.out << plan.dump(2) << '\n';
        return;
      }
      gateway::LlmGateway llm(pipeline::llm_config(c));
      std::optional<gateway::TtsGateway> tts;
      if (!*no_synth) tts.emplace(pipeline::tts_config(c));
      print_outcome(io, pipeline::run(c, {llm, tts ? &*tts : nullptr}));
    };
  });
}

void add_vq(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* vq_cmd = app.add_subcommand("vq", "K-means discretization of feature frames");
  vq_cmd->require_subcommand(1);

  auto* fit = vq_cmd->add_subcommand("fit", "Fit a codebook");
  auto frames = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto opts = std::make_shared<vq::KMeansOptions>();
  fit->add_option("--frames", *frames, "matrix file")->required();
  fit->add_option("--out", *out, "codebook matrix file")->required();
  fit->add_option("--k", opts->k, "cluster count")->check(CLI::PositiveNumber);
  fit->add_option("--iters", opts->max_iters, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  fit->add_option("--seed", opts->seed, "initialization seed");
  fit->add_option("--threads", opts->threads, "assignment threads (0 = all cores)");
  fit->callback([=, &action] {
    action = [=] {
      const auto cb = vq::fit_kmeans(vq::read_matrix(*frames), *opts);
      vq::write_matrix(*out, cb.centroids);
      io.out << json{{"k", cb.k},
                     {"dim", cb.dim},
                     {"iterations", cb.iterations},
                     {"converged", cb.converged},
                     {"train_distortion", cb.train_distortion}}
                    .dump()
             << '\n';
    };
  });

  auto* quant = vq_cmd->add_subcommand("quantize", "Map frames to cluster ids");
  auto codebook = std::make_shared<std::string>();
  auto qframes = std::make_shared<std::string>();
  auto keep = std::make_shared<bool>(false);
  quant->add_option("--codebook", *codebook, "codebook matrix file")->required();
  quant->add_option("--frames", *qframes, "matrix file")->required();
  quant->add_flag("--keep-repeats", *keep, "skip removal of adjacent repeats");
  quant->callback([=, &action] {
    action = [=] {
      const auto cb = vq::codebook_from_centroids(vq::read_matrix(*codebook));
      auto tokens = vq::quantize(cb, vq::read_matrix(*qframes));
      if (!*keep) tokens = vq::dedup(tokens);
      for (std::size_t i = 0; i < tokens.size(); ++i) io.out << (i ? " " : "") << tokens[i];
      io.out << '\n';
    };
  });
}

struct EvalArgs {
  std::string manifest, hyp, emb, spk, probs, out;
  bool raw = false;
};

void add_eval(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("eval", "Objective metrics over ingested sidecars");
  auto a = std::make_shared<EvalArgs>();
  cmd->add_option("--manifest", a->manifest, "manifest.json (reference texts)")->required();
  cmd->add_option("--hyp", a->hyp, "ASR transcripts: utt_id<TAB>text");
  cmd->add_option("--emb", a->emb, "accent embeddings: <utt>:{converted,accented,native}");
  cmd->add_option("--spk", a->spk, "speaker embeddings: <utt>:{converted,source}");
  cmd->add_option("--probs", a->probs, "classifier probabilities: utt_id<TAB>p");
  cmd->add_option("--out", a->out, "write the metrics JSON here");
  cmd->add_flag("--no-normalize", a->raw, "compare transcripts verbatim");
  cmd->callback([=, &action] {
    action = [=] {
      evalkit::EvalInputs in;
      for (const auto& u : corpus::CorpusManifest::load(a->manifest).utterances) {
        in.references[u.utt_id] = u.text;
      }
      if (!a->hyp.empty()) in.hypotheses = evalkit::load_text_sidecar(a->hyp);
      if (!a->emb.empty()) in.accent_embeddings = evalkit::load_vector_sidecar(a->emb);
      if (!a->spk.empty()) in.speaker_embeddings = evalkit::load_vector_sidecar(a->spk);
      if (!a->probs.empty()) in.probs = evalkit::load_prob_sidecar(a->probs);
      if (a->raw) in.normalize = {false, false};
      const auto rep = evalkit::evaluate(in);
      if (!a->out.empty()) gateway::write_file_atomic(a->out, rep.to_json().dump(2) + "\n");
      io.out << rep.table();
    };
  });
}

void add_mushra(CLI::App& app, Streams io, std::function<void()>& action) {
  auto* m = app.add_subcommand("mushra", "MUSHRA listening tests");
  m->require_subcommand(1);

  auto* create = m->add_subcommand("create", "Create a session from a config file");
  auto config = std::make_shared<std::string>();
  auto root = std::make_shared<std::string>("sessions");
  create->add_option("--config", *config, "session config JSON")->required();
  create->add_option("--root", *root, "directory holding sessions");
  create->callback([=, &action] {
    action = [=] {
      const fs::path cpath = *config;
      const auto cfg = mushra::SessionConfig::from_json(json::parse(gateway::read_file(cpath)),
                                                        cpath.parent_path());
      const fs::path dir = fs::path(*root) / cfg.session_id;
      auto s = mushra::Session::create(cfg, dir);
      io.out << dir.string() << '\n';
    };
  });

  auto* serve = m->add_subcommand("serve", "Serve sessions over HTTP");
  auto sessions = std::make_shared<std::vector<std::string>>();
  auto host = std::make_shared<std::string>("127.0.0.1");
  auto port = std::make_shared<int>(8080);
  auto ui = std::make_shared<std::string>();
  serve->add_option("--session", *sessions, "session directory (repeatable)")->required();
  serve->add_option("--host", *host, "bind address");
  serve->add_option("--port", *port, "bind port");
  serve->add_option("--ui", *ui, "static evaluator UI directory");
  serve->callback([=, &action] {
    action = [=] {
      std::vector<fs::path> dirs(sessions->begin(), sessions->end());
      std::optional<fs::path> ui_dir;
      if (!ui->empty()) ui_dir = *ui;
      mushra::Server server(dirs, ui_dir);
      io.err << "serving " << dirs.size() << " session(s) on http://" << *host << ':' << *port
             << '\n';
      server.run(*host, *port);
    };
  });

  auto* report = m->add_subcommand("report", "Print mean ± 95% CI per condition");
  auto session = std::make_shared<std::string>();
  auto as_json = std::make_shared<bool>(false);
  report->add_option("--session", *session, "session directory")->required();
  report->add_flag("--json", *as_json, "machine-readable output");
  report->callback([=, &action] {
    action = [=] {
      auto s = mushra::Session::open(*session);
      if (!*as_json) {
        io.out << s->report();
        return;
      }
      json rows = json::array();
      for (const auto& st : s->stats()) {
        rows.push_back({{"condition", st.condition},
                        {"n", st.n},
                        {"mean", st.mean},
                        {"ci_half_width", st.ci_half_width},
                        {"rendered", st.rendered()}});
      }
      io.out << json{{"session_id", s->config().session_id}, {"conditions", rows}}.dump(2) << '\n';
    };
  });
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Streams io{out, err};
  CLI::App app{"Accent-parallel corpus construction and evaluation", "accentkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", corpus::kToolVersion);
  std::function<void()> action;
  add_phonemize(app, io, action);
  add_romanize(app, io, action);
  add_phonosim(app, io, action);
  add_transliterate(app, io, action);
  add_synth(app, io, action);
  add_build_dataset(app, io, action);
  add_pipeline(app, io, action);
  add_vq(app, io, action);
  add_eval(app, io, action);
  add_mushra(app, io, action);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }
  if (!action) {
    err << app.help();
    return kExitUsage;
  }
  try {
    action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "error[parse]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
  }
  return kExitFailure;
}

}  // namespace accentkit::cli
