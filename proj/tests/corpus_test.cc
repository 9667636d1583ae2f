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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "accentkit/error.h"
#include "accentkit/text.h"
#include "accentkit/wav.h"
#include "test_util.h"

namespace accentkit::corpus {
namespace {

using accentkit::testing::spit;
using accentkit::testing::TempDir;

std::vector<std::string> make_ids(size_t n) {
  std::vector<std::string> ids;
  char buf[32];
  for (size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "arctic_%04zu", i + 1);
    ids.push_back(buf);
  }
  return ids;
}

std::string words(size_t n) {
  std::string s;
  for (size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

TEST(SplitTest, FullCorpusSizes) {
  auto a = split_transcripts(make_ids(1132), {932, 100, 100}, 1234);
  EXPECT_EQ(a.train.size(), 932u);
  EXPECT_EQ(a.val.size(), 100u);
  EXPECT_EQ(a.test.size(), 100u);
}

TEST(SplitTest, SizeMismatchIsError) {
  EXPECT_THROW(split_transcripts(make_ids(10), {5, 2, 2}, 0), Error);
}

TEST(SplitTest, MinimalPartitionDeterministicUnderSeed) {
  auto ids = make_ids(3);
  auto a = split_transcripts(ids, {1, 1, 1}, 42);
  EXPECT_EQ(a.to_json(), split_transcripts(ids, {1, 1, 1}, 42).to_json());
  std::set<std::string> distinct;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto b = split_transcripts(ids, {1, 1, 1}, s);
    distinct.insert(b.train[0] + b.val[0] + b.test[0]);
  }
  EXPECT_GT(distinct.size(), 1u);
}

TEST(SplitProperty, EveryIdInExactlyOneSplit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ids = make_ids(50 + seed);
    auto a = split_transcripts(ids, {30, 10, 10 + seed}, seed);
    std::map<std::string, int> seen;
    for (const auto* v : {&a.train, &a.val, &a.test}) {
      for (const auto& id : *v) ++seen[id];
    }
    EXPECT_EQ(seen.size(), ids.size());
    for (const auto& [id, n] : seen) EXPECT_EQ(n, 1) << id;
    EXPECT_EQ(a.size(), ids.size());
  }
}

TEST(SplitProperty, AssignmentRoundTripsThroughJson) {
  auto a = split_transcripts(make_ids(30), {20, 5, 5}, 7);
  EXPECT_EQ(SplitAssignment::from_json(a.to_json()).to_json(), a.to_json());
}

TEST(SamplingTest, BoundedStaysInRange) {
  std::mt19937_64 rng(5);
  for (std::uint64_t b : {1u, 2u, 3u, 7u, 1000u}) {
    for (int i = 0; i < 500; ++i) EXPECT_LT(bounded(rng, b), b);
  }
  EXPECT_THROW(bounded(rng, 0), Error);
}

TEST(SamplingTest, PermutationOfThreeIsRoughlyUniform) {
  std::map<std::vector<size_t>, int> counts;
  for (std::uint64_t s = 0; s < 6000; ++s) ++counts[seeded_permutation(3, s)];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [perm, n] : counts) EXPECT_NEAR(n, 1000, 150);
}

TEST(AugmentationTest, StrictlyFewerThanMaxWords) {
  std::vector<Transcript> t = {{"a", words(15)}, {"b", words(14)}, {"c", words(3)}};
  auto sel = select_augmentation(t, 15, 2, 0);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].id, "b");
  EXPECT_EQ(sel[1].id, "c");
  EXPECT_THROW(select_augmentation(t, 15, 3, 0), Error);
}

TEST(AugmentationTest, ExhaustiveAndPigeonhole) {
  std::vector<Transcript> pool;
  for (size_t i = 0; i < 4500; ++i) pool.push_back({"p" + std::to_string(i), words(1 + i % 14)});
  auto all = select_augmentation(pool, 15, 4500, 9);
  EXPECT_EQ(all, pool);
  pool.push_back({"long", words(15)});
  pool.erase(pool.begin());
  EXPECT_THROW(select_augmentation(pool, 15, 4500, 9), Error);
}

TEST(AugmentationProperty, SubsetOfEligibleWithExactCount) {
  std::mt19937_64 rng(3);
  std::vector<Transcript> pool;
  for (size_t i = 0; i < 9000; ++i) {
    pool.push_back({"v" + std::to_string(i), words(1 + bounded(rng, 25))});
  }
  auto sel = select_augmentation(pool, 15, 4500, 77);
  EXPECT_EQ(sel.size(), 4500u);
  std::set<std::string> ids;
  size_t last = 0;
  for (const auto& t : sel) {
    EXPECT_LT(text::split_whitespace(t.text).size(), 15u);
    EXPECT_TRUE(ids.insert(t.id).second);
    size_t idx = std::stoul(t.id.substr(1));
    EXPECT_TRUE(ids.size() == 1 || idx > last);
    last = idx;
  }
  EXPECT_EQ(sel, select_augmentation(pool, 15, 4500, 77));
}

TEST(TranscriptsTest, FestivalTsvAndDirectory) {
  TempDir dir;
  spit(dir / "a.data",
       "( arctic_a0001 \"Author of the danger trail, Philip Steels, etc.\" )\n"
       "\n( arctic_a0002 \"Not at this particular case, Tom.\" )\n");
  auto f = load_transcripts(dir / "a.data");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].id, "arctic_a0001");
  EXPECT_EQ(f[1].text, "Not at this particular case, Tom.");

  spit(dir / "b.tsv", "u1\tLet's go\n# comment\nu2\tGo.\n");
  auto t = load_transcripts(dir / "b.tsv");
  EXPECT_EQ(t, (std::vector<Transcript>{{"u1", "Let's go"}, {"u2", "Go."}}));

  spit(dir / "vctk/p225/p225_002.txt", "Ask her to bring these things.\n");
  spit(dir / "vctk/p225/p225_001.txt", "Please call Stella.\n");
  auto v = load_transcripts(dir / "vctk");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].id, "p225_001");
  EXPECT_EQ(v[0].text, "Please call Stella.");

  spit(dir / "bad.txt", "no id here\n");
  EXPECT_THROW(load_transcripts(dir / "bad.txt"), Error);
  EXPECT_THROW(load_transcripts(dir / "missing.txt"), Error);
}

// ---------------------------------------------------------------- manifest

struct ManifestFixture {
  TempDir dir;
  std::vector<SpeakerRef> speakers = {{"SLT", "american", {}, std::nullopt}};
  std::vector<Transcript> transcripts = {{"t1", "Let's go."}, {"t2", "Go."}};
  SplitAssignment splits;

  ManifestFixture() {
    splits.train = {"t1"};
    splits.test = {"t2"};
  }

  std::vector<PairedUtterance> complete() {
    auto utts = plan_utterances(speakers, transcripts, splits, {"japanese"});
    for (auto& u : utts) {
      u.target_text = "x";
      u.source_audio = "audio/" + u.utt_id + "_src.wav";
      u.target_audio = "audio/" + u.utt_id + "_tgt.wav";
      spit(dir / u.source_audio, "RIFF");
      spit(dir / u.target_audio, "RIFF");
    }
    return utts;
  }
};

TEST(ManifestTest, CompleteCorpusHasEmptyReport) {
  ManifestFixture fx;
  auto r = build_manifest(fx.speakers, fx.splits, fx.complete(), fx.dir.path(), {}, true);
  EXPECT_EQ(r.manifest.utterances.size(), 2u);
  EXPECT_TRUE(r.report.issues.empty()) << r.report.to_json().dump();
  EXPECT_EQ(r.manifest.utterances[0].utt_id, "SLT_japanese_t1");
}

TEST(ManifestTest, MissingTargetAudioNamesUtterance) {
  ManifestFixture fx;
  auto utts = fx.complete();
  std::filesystem::remove(fx.dir / utts[1].target_audio);
  auto r = build_manifest(fx.speakers, fx.splits, utts, fx.dir.path(), {}, true);
  ASSERT_EQ(r.report.count("dangling_ref"), 1u);
  EXPECT_EQ(r.report.issues[0].utt_id, "SLT_japanese_t2");
  EXPECT_FALSE(r.report.ok());
}

TEST(ManifestTest, SplitLeakIsWarning) {
  ManifestFixture fx;
  fx.transcripts[1].text = "let's  GO";
  auto r = build_manifest(fx.speakers, fx.splits, fx.complete(), fx.dir.path(), {}, true);
  EXPECT_EQ(r.report.count("split_leak"), 1u);
  EXPECT_TRUE(r.report.ok());
}

TEST(ManifestTest, DuplicatesAndDanglingSpeaker) {
  ManifestFixture fx;
  auto utts = fx.complete();
  utts.push_back(utts[0]);
  utts[1].speaker_id = "ASI";
  auto r = build_manifest(fx.speakers, fx.splits, utts, fx.dir.path(), {}, true);
  EXPECT_EQ(r.report.count("duplicate_id"), 1u);
  EXPECT_EQ(r.report.count("dangling_ref"), 1u);
}

TEST(ManifestTest, UnsynthesizedOnlyWhenAudioRequired) {
  ManifestFixture fx;
  auto utts = plan_utterances(fx.speakers, fx.transcripts, fx.splits, {"hindi"});
  EXPECT_TRUE(build_manifest(fx.speakers, fx.splits, utts, fx.dir.path(), {}, false).report.ok());
  EXPECT_EQ(build_manifest(fx.speakers, fx.splits, utts, fx.dir.path(), {}, true)
                .report.count("unsynthesized"),
            4u);
}

TEST(ManifestProperty, ValidationIsIdempotentAndPure) {
  ManifestFixture fx;
  auto r = build_manifest(fx.speakers, fx.splits, fx.complete(), fx.dir.path(), {}, true);
  const auto before = r.manifest.to_json();
  auto a = validate_manifest(r.manifest, fx.dir.path()).to_json();
  auto b = validate_manifest(r.manifest, fx.dir.path()).to_json();
  EXPECT_EQ(a, b);
  EXPECT_EQ(r.manifest.to_json(), before);
}

TEST(ManifestTest, SaveLoadRoundTrip) {
  ManifestFixture fx;
  auto r = build_manifest(fx.speakers, fx.splits, fx.complete(), fx.dir.path(),
                          {{"tool_version", kToolVersion}, {"seed", 1}}, true);
  r.manifest.save(fx.dir / "manifest.json");
  EXPECT_EQ(CorpusManifest::load(fx.dir / "manifest.json").to_json(), r.manifest.to_json());
}

class CountingTts : public gateway::TtsService {
 public:
  gateway::TtsResult synthesize(const gateway::TtsRequest& req) override {
    ++calls;
    texts.push_back(req.text);
    gateway::TtsResult r;
    r.wav = wav::encode(wav::tone(0.25, 200.0 + static_cast<double>(req.text.size())));
    r.meta.duration_seconds = 0.25;
    r.meta.sample_rate = 16000;
    return r;
  }
  int calls = 0;
  std::vector<std::string> texts;
};

TEST(SynthesizeTest, FillsAudioAndPrefersRecordings) {
  ManifestFixture fx;
  const auto assets = fx.dir / "assets";
  spit(assets / "speakers/SLT/ref.wav", wav::encode(wav::tone(0.1)));
  spit(assets / "speakers/ASI/ref.wav", wav::encode(wav::tone(0.1)));
  spit(assets / "recordings/ASI/t1.wav", wav::encode(wav::tone(0.3)));
  fx.speakers.push_back({"ASI", "hindi", {}, "recordings/ASI"});
  auto utts = plan_utterances(fx.speakers, fx.transcripts, fx.splits, {"japanese"});
  for (auto& u : utts) u.target_text = "ゴー.";
  auto r = build_manifest(fx.speakers, fx.splits, utts, fx.dir / "out", {}, false);

  CountingTts tts;
  int n = synthesize_manifest(r.manifest, tts, fx.dir / "out", {assets, {}});
  // 4 targets; SLT sources synthesized (2); ASI t1 source from recordings, t2 synthesized.
  EXPECT_EQ(n, 7);
  EXPECT_EQ(tts.calls, 7);
  EXPECT_TRUE(validate_manifest(r.manifest, fx.dir / "out").ok());
  EXPECT_EQ(r.manifest.utterances[2].origin, Origin::kGroundTruth);
  EXPECT_EQ(r.manifest.utterances[0].origin, Origin::kSynthesized);
  EXPECT_DOUBLE_EQ(r.manifest.utterances[0].target_duration, 0.25);

  EXPECT_EQ(synthesize_manifest(r.manifest, tts, fx.dir / "out", {assets, {}}), 0);
}

TEST(SynthesizeTest, NeedsTransliteration) {
  ManifestFixture fx;
  spit(fx.dir / "assets/speakers/SLT/ref.wav", wav::encode(wav::tone(0.1)));
  auto utts = plan_utterances(fx.speakers, fx.transcripts, fx.splits, {"japanese"});
  auto r = build_manifest(fx.speakers, fx.splits, utts, fx.dir / "out", {}, false);
  CountingTts tts;
  EXPECT_THROW(synthesize_manifest(r.manifest, tts, fx.dir / "out", {fx.dir / "assets", {}}),
               Error);
}

}  // namespace
}  // namespace accentkit::corpus
