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

#include "accentkit/wav.h"

#include <cmath>
#include <numbers>

#include "accentkit/error.h"

namespace accentkit::wav {
namespace {

std::uint32_t read_u32(std::string_view b, size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

std::uint16_t read_u16(std::string_view b, size_t off) {
  return static_cast<std::uint16_t>(
      static_cast<unsigned char>(b[off]) |
      static_cast<unsigned char>(b[off + 1]) << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCategory::kParse, "WAV: " + what);
}

}  // namespace

PcmAudio decode(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    bad("missing RIFF/WAVE header");
  }
  PcmAudio audio;
  bool have_fmt = false;
  size_t off = 12;
  while (off + 8 <= b.size()) {
    std::string_view id = b.substr(off, 4);
    std::uint32_t size = read_u32(b, off + 4);
    size_t body = off + 8;
    if (body + size > b.size()) bad("truncated chunk");
    if (id == "fmt ") {
      if (size < 16) bad("short fmt chunk");
      std::uint16_t format = read_u16(b, body);
      audio.channels = read_u16(b, body + 2);
      audio.sample_rate = static_cast<int>(read_u32(b, body + 4));
      std::uint16_t bits = read_u16(b, body + 14);
      if (format != 1 || bits != 16) bad("only 16-bit PCM is supported");
      if (audio.channels < 1) bad("zero channels");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) bad("data before fmt");
      audio.samples.resize(size / 2);
      for (size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<std::int16_t>(read_u16(b, body + 2 * i));
      }
      return audio;
    }
    off = body + size + (size & 1);
  }
  bad("no data chunk");
}

std::string encode(const PcmAudio& audio) {
  std::string out;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, static_cast<std::uint16_t>(audio.channels));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate * audio.channels * 2));
  put_u16(out, static_cast<std::uint16_t>(audio.channels * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (std::int16_t s : audio.samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

PcmAudio to_corpus_format(const PcmAudio& audio) {
  PcmAudio mono;
  mono.sample_rate = audio.sample_rate;
  mono.channels = 1;
  const size_t frames = audio.frames();
  mono.samples.resize(frames);
  for (size_t f = 0; f < frames; ++f) {
    long acc = 0;
    for (int c = 0; c < audio.channels; ++c) acc += audio.samples[f * audio.channels + c];
    mono.samples[f] = static_cast<std::int16_t>(acc / audio.channels);
  }
  if (mono.sample_rate == kCorpusSampleRate || frames == 0) return mono;

  PcmAudio out;
  out.sample_rate = kCorpusSampleRate;
  out.channels = 1;
  const double ratio = static_cast<double>(audio.sample_rate) / kCorpusSampleRate;
  const size_t out_frames =
      static_cast<size_t>(std::floor(static_cast<double>(frames) / ratio));
  out.samples.resize(out_frames);
  for (size_t i = 0; i < out_frames; ++i) {
    double pos = static_cast<double>(i) * ratio;
    size_t i0 = static_cast<size_t>(pos);
    size_t i1 = std::min(i0 + 1, frames - 1);
    double frac = pos - static_cast<double>(i0);
    double v = mono.samples[i0] * (1.0 - frac) + mono.samples[i1] * frac;
    out.samples[i] = static_cast<std::int16_t>(std::lround(v));
  }
  return out;
}

PcmAudio tone(double seconds, double hz, int sample_rate) {
  PcmAudio audio;
  audio.sample_rate = sample_rate;
  audio.channels = 1;
  const size_t n = static_cast<size_t>(seconds * sample_rate);
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sample_rate;
    audio.samples[i] = static_cast<std::int16_t>(
        std::lround(8000.0 * std::sin(2.0 * std::numbers::pi * hz * t)));
  }
  return audio;
}

}  // namespace accentkit::wav
