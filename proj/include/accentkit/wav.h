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

// Minimal RIFF/WAVE PCM16 reader and writer.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace accentkit::wav {

inline constexpr int kCorpusSampleRate = 16000;

struct PcmAudio {
  int sample_rate = kCorpusSampleRate;
  int channels = 1;
  std::vector<std::int16_t> samples;  // interleaved

  std::size_t frames() const {
    return channels > 0 ? samples.size() / channels : 0;
  }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
  }
};

// Throws Error(kParse) for anything but uncompressed 16-bit PCM.
PcmAudio decode(std::string_view bytes);
std::string encode(const PcmAudio& audio);

// Downmix to mono and linearly resample to the corpus rate.
PcmAudio to_corpus_format(const PcmAudio& audio);

// Sine tone, handy for fixtures.
PcmAudio tone(double seconds, double hz = 440.0,
              int sample_rate = kCorpusSampleRate);

}  // namespace accentkit::wav
