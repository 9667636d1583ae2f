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

// Letter-faithful romanizers for Hangul, katakana and Devanagari.
//
// Output is plain ASCII so it can be scored by edit distance against an
// English pronunciation. Characters outside each script pass through.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace accentkit::romanizer {

inline constexpr char32_t kHangulBase = 0xAC00;
inline constexpr char32_t kHangulLast = 0xD7A3;
inline constexpr int kInitialCount = 19;
inline constexpr int kMedialCount = 21;
inline constexpr int kFinalCount = 28;  // index 0 = no final

struct JamoTriple {
  int initial = 0;
  int medial = 0;
  int final = 0;

  bool operator==(const JamoTriple&) const = default;
};

bool is_hangul_syllable(char32_t cp);

// Throws Error(kInvalidArgument) for codepoints outside [U+AC00, U+D7A3].
JamoTriple decompose_hangul(char32_t syllable);
char32_t compose_hangul(const JamoTriple& jamo);

struct Romanization {
  std::string text;
  // Orphan marks and unmapped codepoints; these are emitted unchanged.
  std::vector<std::string> issues;
};

Romanization romanize_hangul(std::string_view text);
Romanization romanize_katakana(std::string_view text);
Romanization romanize_devanagari(std::string_view text);

enum class Script { kHangul, kKatakana, kDevanagari };

// "ko", "ja", "hi" (also "korean", "japanese", "hindi").
Script parse_script(std::string_view id);
Romanization romanize(Script script, std::string_view text);

}  // namespace accentkit::romanizer
