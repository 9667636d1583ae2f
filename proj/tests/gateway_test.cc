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

#include "accentkit/gateway.h"

#include <gtest/gtest.h>

#include <future>
#include <vector>

#include "accentkit/error.h"
#include "accentkit/wav.h"
#include "mock_server.h"
#include "test_util.h"

namespace accentkit::gateway {
namespace {

using accentkit::testing::chat_reply;
using accentkit::testing::MockServer;
using accentkit::testing::slurp;
using accentkit::testing::spit;
using accentkit::testing::TempDir;

ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  return ErrorCategory::kInternal;
}

LlmConfig live_config(const TempDir& dir, const std::string& url, int in_flight = 4) {
  LlmConfig cfg;
  cfg.mode = Mode::kLive;
  cfg.cache_root = dir.path() / "cache";
  cfg.endpoint.base_url = url;
  cfg.endpoint.path = "/v1/chat/completions";
  cfg.endpoint.api_key = "sk-test";
  cfg.endpoint.max_in_flight = in_flight;
  cfg.endpoint.retry.base_delay = std::chrono::milliseconds(1);
  cfg.endpoint.retry.max_delay = std::chrono::milliseconds(4);
  cfg.endpoint.retry.max_attempts = 3;
  cfg.endpoint.timeout = std::chrono::seconds(10);
  return cfg;
}

// Reference values from Python's hashlib over the documented canonical form.
TEST(LlmRequestTest, DigestMatchesCanonicalForm) {
  LlmRequest a{"gpt-3.5-turbo", "hello", nlohmann::json::object(), 0};
  EXPECT_EQ(a.digest(),
            "10a883f1191677892155b1bc3b78a15674bb59e4ff1a7927618f162412d1ef80");
  LlmRequest b{"gpt-3.5-turbo", "hello", {{"temperature", 0}}, 2};
  EXPECT_EQ(b.digest(),
            "05c04f5a6dff312007b1a27a833b497adc6f4590a63de29c25a4b4143f327236");
}

TEST(LlmRequestTest, DigestSeparatesEveryField) {
  LlmRequest base{"m", "p", nlohmann::json::object(), 0};
  std::vector<LlmRequest> variants = {
      {"m2", "p", nlohmann::json::object(), 0},
      {"m", "p2", nlohmann::json::object(), 0},
      {"m", "p", {{"top_p", 1}}, 0},
      {"m", "p", nlohmann::json::object(), 1},
      // Field boundaries cannot be shifted.
      {"mp", "", nlohmann::json::object(), 0},
  };
  for (const auto& v : variants) EXPECT_NE(v.digest(), base.digest());
  EXPECT_EQ(base.digest(), (LlmRequest{"m", "p", nlohmann::json::object(), 0}).digest());
}

TEST(LlmGatewayTest, ReplayServesStoredResponseVerbatim) {
  TempDir dir;
  LlmConfig cfg;
  cfg.cache_root = dir.path() / "cache";
  LlmGateway gw(cfg);
  const std::string reply = slurp(accentkit::testing::test_data_dir() / "lets_go_response.txt");
  LlmRequest req{"gpt-4o", "prompt", nlohmann::json::object(), 3};
  gw.put(req, reply);
  EXPECT_EQ(gw.complete(req), reply);
  EXPECT_EQ(gw.stats().network_calls, 0);
  EXPECT_TRUE(std::filesystem::exists(cfg.cache_root / "llm" / (req.digest() + ".json")));
}

TEST(LlmGatewayTest, ReplayMissIsError) {
  TempDir dir;
  LlmConfig cfg;
  cfg.cache_root = dir.path() / "cache";
  LlmGateway gw(cfg);
  EXPECT_EQ(category_of([&] { gw.complete({"m", "p", nlohmann::json::object(), 0}); }),
            ErrorCategory::kReplayMiss);
}

TEST(LlmGatewayTest, SecondIdenticalCallIsServedFromCache) {
  TempDir dir;
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_reply("{\"go\": 1}"), "application/json");
  });
  LlmGateway gw(live_config(dir, server.url()));
  LlmRequest req{"gpt-3.5-turbo", "hi", nlohmann::json::object(), 0};
  EXPECT_EQ(gw.complete(req), "{\"go\": 1}");
  EXPECT_EQ(gw.complete(req), "{\"go\": 1}");
  EXPECT_EQ(server.calls(), 1);
  EXPECT_EQ(gw.stats().cache_hits, 1);
  EXPECT_EQ(server.last_auth(), "Bearer sk-test");
  auto body = nlohmann::json::parse(server.last_body());
  EXPECT_EQ(body["model"], "gpt-3.5-turbo");
  EXPECT_EQ(body["messages"][0]["content"], "hi");
}

TEST(LlmGatewayTest, CacheSurvivesRestart) {
  TempDir dir;
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_reply("ok"), "application/json");
  });
  LlmRequest req{"m", "p", nlohmann::json::object(), 0};
  { LlmGateway(live_config(dir, server.url())).complete(req); }
  LlmConfig replay;
  replay.cache_root = dir.path() / "cache";
  EXPECT_EQ(LlmGateway(replay).complete(req), "ok");
  EXPECT_EQ(server.calls(), 1);
}

TEST(LlmGatewayTest, RetriesTransientFailures) {
  TempDir dir;
  std::atomic<int> n{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++n < 3) {
      res.status = 503;
      return;
    }
    res.set_content(chat_reply("third time"), "application/json");
  });
  LlmGateway gw(live_config(dir, server.url()));
  EXPECT_EQ(gw.complete({"m", "p", nlohmann::json::object(), 0}), "third time");
  EXPECT_EQ(server.calls(), 3);
}

TEST(LlmGatewayTest, PersistentRateLimitIsReported) {
  TempDir dir;
  MockServer server([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  LlmGateway gw(live_config(dir, server.url()));
  EXPECT_EQ(category_of([&] { gw.complete({"m", "p", nlohmann::json::object(), 0}); }),
            ErrorCategory::kRateLimited);
  EXPECT_EQ(server.calls(), 3);
}

TEST(LlmGatewayTest, AuthFailureIsNotRetried) {
  TempDir dir;
  MockServer server([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  LlmGateway gw(live_config(dir, server.url()));
  EXPECT_EQ(category_of([&] { gw.complete({"m", "p", nlohmann::json::object(), 0}); }),
            ErrorCategory::kAuth);
  EXPECT_EQ(server.calls(), 1);
}

TEST(LlmGatewayTest, ConnectionRefusedIsNetworkError) {
  TempDir dir;
  LlmGateway gw(live_config(dir, "http://127.0.0.1:1"));
  EXPECT_EQ(category_of([&] { gw.complete({"m", "p", nlohmann::json::object(), 0}); }),
            ErrorCategory::kNetwork);
}

TEST(LlmGatewayTest, BurstRespectsInFlightCap) {
  TempDir dir;
  MockServer server(
      [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(chat_reply(req.body.substr(0, 8)), "application/json");
      },
      std::chrono::milliseconds(20));
  LlmGateway gw(live_config(dir, server.url(), 4));
  std::vector<std::future<std::string>> futures;
  for (int i = 0; i < 50; ++i) {
    futures.push_back(std::async(std::launch::async, [&gw, i] {
      return gw.complete({"m", "burst", nlohmann::json::object(), i});
    }));
  }
  for (auto& f : futures) EXPECT_FALSE(f.get().empty());
  EXPECT_EQ(server.calls(), 50);
  EXPECT_LE(server.max_in_flight(), 4);
  EXPECT_GE(server.max_in_flight(), 2);
}

TEST(LlmGatewayTest, ConcurrentIdenticalRequestsHitNetworkOnce) {
  TempDir dir;
  MockServer server(
      [](const httplib::Request&, httplib::Response& res) {
        res.set_content(chat_reply("same"), "application/json");
      },
      std::chrono::milliseconds(10));
  LlmGateway gw(live_config(dir, server.url(), 8));
  std::vector<std::future<std::string>> futures;
  for (int i = 0; i < 8; ++i) {
    futures.push_back(std::async(std::launch::async, [&gw] {
      return gw.complete({"m", "p", nlohmann::json::object(), 0});
    }));
  }
  for (auto& f : futures) EXPECT_EQ(f.get(), "same");
  EXPECT_EQ(server.calls(), 1);
}

// ---------------------------------------------------------------- TTS

struct TtsFixture {
  TempDir dir;
  std::filesystem::path assets = dir / "assets";

  TtsFixture() {
    spit(assets / "speakers/SLT/a0002.wav", wav::encode(wav::tone(0.2, 330.0)));
    spit(assets / "speakers/SLT/a0001.wav", wav::encode(wav::tone(0.2, 220.0)));
  }

  TtsConfig config(Mode mode, const std::string& url) const {
    TtsConfig cfg;
    cfg.mode = mode;
    cfg.cache_root = dir / "cache";
    cfg.asset_root = assets;
    cfg.provider = "mock-tts";
    cfg.endpoint.base_url = url;
    cfg.endpoint.path = "/v1/tts";
    cfg.endpoint.retry.base_delay = std::chrono::milliseconds(1);
    cfg.endpoint.retry.max_attempts = 2;
    return cfg;
  }
};

// One second of 22.05 kHz stereo, as a provider might send it.
std::string provider_wav() {
  wav::PcmAudio a = wav::tone(1.0, 440.0, 22050);
  wav::PcmAudio stereo;
  stereo.sample_rate = 22050;
  stereo.channels = 2;
  for (auto s : a.samples) {
    stereo.samples.push_back(s);
    stereo.samples.push_back(s);
  }
  return wav::encode(stereo);
}

TEST(SpeakerClipsTest, SortedAssetIds) {
  TtsFixture fx;
  EXPECT_EQ(speaker_clips(fx.assets, "SLT"),
            (std::vector<std::string>{"speakers/SLT/a0001.wav", "speakers/SLT/a0002.wav"}));
  EXPECT_EQ(category_of([&] { speaker_clips(fx.assets, "NOPE"); }),
            ErrorCategory::kNotFound);
}

TEST(TtsGatewayTest, StoresOnceAsCorpusFormatThenHitsCache) {
  TtsFixture fx;
  std::string last_text;
  bool saw_language = true;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    last_text = req.get_file_value("text").content;
    saw_language = req.has_file("language");
    res.set_content(provider_wav(), "audio/wav");
  });
  TtsGateway gw(fx.config(Mode::kLive, server.url()));
  TtsRequest req{"レッツ ゴー.", speaker_clips(fx.assets, "SLT"), {{"model_id", "m"}}};
  TtsResult first = gw.synthesize(req);
  EXPECT_EQ(last_text, "レッツ ゴー.");
  EXPECT_FALSE(saw_language);
  EXPECT_EQ(first.meta.sample_rate, 16000);
  EXPECT_NEAR(first.meta.duration_seconds, 1.0, 1e-3);
  wav::PcmAudio stored = wav::decode(slurp(first.meta.path));
  EXPECT_EQ(stored.channels, 1);
  EXPECT_EQ(stored.sample_rate, 16000);

  TtsResult second = gw.synthesize(req);
  EXPECT_EQ(server.calls(), 1);
  EXPECT_EQ(second.wav, first.wav);
  EXPECT_EQ(gw.stats().cache_hits, 1);
}

TEST(TtsGatewayTest, DigestTracksSpeakerAudioContent) {
  TtsFixture fx;
  TtsGateway gw(fx.config(Mode::kReplayOnly, ""));
  TtsRequest req{"text", {"speakers/SLT/a0001.wav"}, nlohmann::json::object()};
  const std::string before = gw.digest(req);
  spit(fx.assets / "speakers/SLT/a0001.wav", wav::encode(wav::tone(0.3, 220.0)));
  EXPECT_NE(gw.digest(req), before);
}

TEST(TtsGatewayTest, Preconditions) {
  TtsFixture fx;
  TtsGateway gw(fx.config(Mode::kReplayOnly, ""));
  EXPECT_EQ(category_of([&] { gw.synthesize({"", {"speakers/SLT/a0001.wav"}, {}}); }),
            ErrorCategory::kInvalidArgument);
  EXPECT_EQ(category_of([&] { gw.synthesize({"x", {"speakers/SLT/none.wav"}, {}}); }),
            ErrorCategory::kNotFound);
  EXPECT_EQ(category_of([&] { gw.synthesize({"x", {"speakers/SLT/a0001.wav"}, {}}); }),
            ErrorCategory::kReplayMiss);
}

TEST(TtsGatewayTest, EmptyAudioIsError) {
  TtsFixture fx;
  MockServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(wav::encode(wav::PcmAudio{}), "audio/wav");
  });
  TtsGateway gw(fx.config(Mode::kLive, server.url()));
  EXPECT_EQ(category_of([&] { gw.synthesize({"x", {"speakers/SLT/a0001.wav"}, {}}); }),
            ErrorCategory::kNetwork);
}

TEST(WavTest, RoundTripAndResample) {
  wav::PcmAudio a = wav::tone(0.5, 440.0, 16000);
  wav::PcmAudio b = wav::decode(wav::encode(a));
  EXPECT_EQ(b.samples, a.samples);
  EXPECT_EQ(b.sample_rate, 16000);
  wav::PcmAudio c = wav::to_corpus_format(wav::tone(0.5, 440.0, 48000));
  EXPECT_EQ(c.sample_rate, 16000);
  EXPECT_EQ(c.frames(), 8000u);
  EXPECT_THROW(wav::decode("not a wav"), Error);
}

}  // namespace
}  // namespace accentkit::gateway
