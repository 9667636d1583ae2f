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

// Coarse pronunciation similarity between an English phone sequence and a
// romanized transliteration. Both sides are reduced to a shared inventory of
// phone classes and compared with a weighted edit distance.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "accentkit/g2p.h"

namespace accentkit::phonosim {

enum class PhoneKey : std::uint8_t {
  // consonants
  kP, kB, kT, kD, kK, kG, kTs, kCh, kS, kZ, kSh, kTh, kFv, kH,
  kM, kN, kLr, kW, kJ,
  // vowels
  kA, kE, kI, kO, kU, kSchwa,
};

inline constexpr int kPhoneKeyCount = 25;

enum class KeyGroup : std::uint8_t {
  kStop, kAffricate, kFricative, kNasal, kApproximant, kFrontVowel,
  kBackVowel,
};

KeyGroup group_of(PhoneKey k);
std::string_view key_name(PhoneKey k);  // "p", "ts", "l/r", "ə", ...
bool is_vowel_key(PhoneKey k);

using PhoneKeySeq = std::vector<PhoneKey>;

std::string format_keys(const PhoneKeySeq& keys);  // "[l/r, e, ts]"

// Stress marks are dropped; adjacent t,s merge into ts. Throws on empty
// input or an IPA symbol outside the supported inventory.
PhoneKeySeq keys_from_ipa(const g2p::PhonemeSequence& seq);
PhoneKeySeq keys_from_ipa_text(std::string_view rendered_ipa);

// Greedy longest-match over ASCII digraphs. Doubled letters collapse (long
// vowels, geminate consonants). Whitespace, hyphens and apostrophes are
// ignored. Throws Error(kParse) on any other residue.
PhoneKeySeq keys_from_roman(std::string_view roman);

struct SimilarityCosts {
  double within_group = 0.5;
  double cross_group = 1.0;
  double indel = 1.0;
  // Unmatched u / ə / i in the final position of either sequence.
  double final_epenthesis = 0.3;

  static SimilarityCosts unit() { return {1.0, 1.0, 1.0, 1.0}; }
};

double edit_cost(const PhoneKeySeq& a, const PhoneKeySeq& b,
                 const SimilarityCosts& costs = {});

// 1 - edit_cost / max(|a|, |b|); 1 when both are empty.
double similarity(const PhoneKeySeq& a, const PhoneKeySeq& b,
                  const SimilarityCosts& costs = {});

}  // namespace accentkit::phonosim
