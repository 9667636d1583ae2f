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

#include "accentkit/romanizer.h"

#include <array>
#include <cstdio>

#include "accentkit/error.h"
#include "accentkit/text.h"

namespace accentkit::romanizer {
namespace {

std::string codepoint_label(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

// ---------------------------------------------------------------------------
// Hangul (Revised Romanization, letter-by-letter transliteration)

constexpr std::array<std::string_view, kInitialCount> kInitials = {
    "g", "kk", "n", "d", "tt", "r", "m", "b", "pp", "s",
    "ss", "", "j", "jj", "ch", "k", "t", "p", "h"};

constexpr std::array<std::string_view, kMedialCount> kMedials = {
    "a",  "ae", "ya", "yae", "eo", "e",  "yeo", "ye", "o",  "wa", "wae",
    "oe", "yo", "u",  "wo",  "we", "wi", "yu",  "eu", "ui", "i"};

constexpr std::array<std::string_view, kFinalCount> kFinals = {
    "",   "g",  "kk", "gs", "n", "nj", "nh", "d", "l", "lg",
    "lm", "lb", "ls", "lt", "lp", "lh", "m", "b", "bs", "s",
    "ss", "ng", "j",  "ch", "k", "t",  "p", "h"};

// ---------------------------------------------------------------------------
// Katakana (Hepburn)

constexpr char32_t kSokuon = 0x30C3;    // ッ
constexpr char32_t kChoonpu = 0x30FC;   // ー

// Romaji for U+30A1..U+30FA. Small kana are handled separately and map to
// their full-size reading here.
constexpr std::array<std::string_view, 0x30FA - 0x30A1 + 1> kKatakana = {
    "a",  "a",  "i",  "i",  "u",  "u",   "e",  "e",  "o",  "o",    // 30A1
    "ka", "ga", "ki", "gi", "ku", "gu",  "ke", "ge", "ko", "go",   // 30AB
    "sa", "za", "shi", "ji", "su", "zu", "se", "ze", "so", "zo",   // 30B5
    "ta", "da", "chi", "ji", "tsu", "tsu", "zu", "te", "de", "to",  // 30BF
    "do",                                                           // 30C9
    "na", "ni", "nu", "ne", "no",                                   // 30CA
    "ha", "ba", "pa", "hi", "bi", "pi", "fu", "bu", "pu",           // 30CF
    "he", "be", "pe", "ho", "bo", "po",                             // 30D8
    "ma", "mi", "mu", "me", "mo",                                   // 30DE
    "ya", "ya", "yu", "yu", "yo", "yo",                             // 30E3
    "ra", "ri", "ru", "re", "ro",                                   // 30E9
    "wa", "wa", "wi", "we", "o",  "n",  "vu", "ka", "ke",           // 30EE
    "va", "vi", "ve", "vo"};                                        // 30F7

bool is_small_vowel(char32_t cp) {
  return cp == 0x30A1 || cp == 0x30A3 || cp == 0x30A5 || cp == 0x30A7 ||
         cp == 0x30A9;
}

bool is_small_y(char32_t cp) {
  return cp == 0x30E3 || cp == 0x30E5 || cp == 0x30E7;
}

bool is_small_wa(char32_t cp) { return cp == 0x30EE; }

bool in_katakana_table(char32_t cp) { return cp >= 0x30A1 && cp <= 0x30FA; }

bool is_base_kana(char32_t cp) {
  return in_katakana_table(cp) && cp != kSokuon && !is_small_vowel(cp) &&
         !is_small_y(cp) && !is_small_wa(cp);
}

std::string kana(char32_t cp) { return std::string(kKatakana[cp - 0x30A1]); }

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'i' || c == 'u' || c == 'e' || c == 'o';
}

// One syllable unit starting at s[i]; advances i past any small kana that
// combine with it.
std::string katakana_unit(const std::u32string& s, size_t& i) {
  std::string r = kana(s[i]);
  ++i;
  if (i >= s.size()) return r;
  char32_t next = s[i];
  if (is_small_y(next) && r.size() >= 2 && r.back() == 'i') {
    std::string glide = kana(next);  // ya / yu / yo
    ++i;
    if (r == "shi" || r == "chi" || r == "ji") {
      return r.substr(0, r.size() - 1) + glide.substr(1);
    }
    return r.substr(0, r.size() - 1) + glide;
  }
  if (is_small_vowel(next)) {
    std::string vowel = kana(next);
    ++i;
    if (r == "u") return "w" + vowel;
    if (r == "i") return "y" + vowel;
    if (r == "ku" || r == "gu") return r.substr(0, 1) + "w" + vowel;
    return r.substr(0, r.size() - 1) + vowel;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Devanagari

constexpr char32_t kVirama = 0x094D;
constexpr char32_t kNukta = 0x093C;

std::string_view devanagari_consonant(char32_t cp) {
  static constexpr std::array<std::string_view, 0x0939 - 0x0915 + 1> kCons = {
      "k",  "kh", "g", "gh", "ng", "ch", "chh", "j", "jh", "ny",  // 0915
      "t",  "th", "d", "dh", "n",                                  // 091F
      "t",  "th", "d", "dh", "n", "n",                             // 0924
      "p",  "ph", "b", "bh", "m",                                  // 092A
      "y",  "r",  "r", "l",  "l", "l", "v",                        // 092F
      "sh", "sh", "s", "h"};                                       // 0936
  if (cp >= 0x0915 && cp <= 0x0939) return kCons[cp - 0x0915];
  static constexpr std::array<std::string_view, 8> kNuktaForms = {
      "q", "kh", "g", "z", "r", "rh", "f", "y"};  // 0958..095F
  if (cp >= 0x0958 && cp <= 0x095F) return kNuktaForms[cp - 0x0958];
  return {};
}

// Consonant followed by a combining nukta.
std::string_view devanagari_nukta_form(char32_t cp) {
  switch (cp) {
    case 0x0915: return "q";
    case 0x0916: return "kh";
    case 0x0917: return "g";
    case 0x091C: return "z";
    case 0x0921: return "r";
    case 0x0922: return "rh";
    case 0x092B: return "f";
    case 0x092F: return "y";
    default: return devanagari_consonant(cp);
  }
}

std::string_view devanagari_matra(char32_t cp) {
  switch (cp) {
    case 0x093E: return "aa";
    case 0x093F: return "i";
    case 0x0940: return "ii";
    case 0x0941: return "u";
    case 0x0942: return "uu";
    case 0x0943: return "ri";
    case 0x0944: return "rii";
    case 0x0945: return "e";
    case 0x0946: return "e";
    case 0x0947: return "e";
    case 0x0948: return "ai";
    case 0x0949: return "o";
    case 0x094A: return "o";
    case 0x094B: return "o";
    case 0x094C: return "au";
    default: return {};
  }
}

std::string_view devanagari_vowel(char32_t cp) {
  switch (cp) {
    case 0x0905: return "a";
    case 0x0906: return "aa";
    case 0x0907: return "i";
    case 0x0908: return "ii";
    case 0x0909: return "u";
    case 0x090A: return "uu";
    case 0x090B: return "ri";
    case 0x0960: return "rii";
    case 0x090C: return "li";
    case 0x090D: return "e";
    case 0x090E: return "e";
    case 0x090F: return "e";
    case 0x0910: return "ai";
    case 0x0911: return "o";
    case 0x0912: return "o";
    case 0x0913: return "o";
    case 0x0914: return "au";
    default: return {};
  }
}

// Signs that stand on their own after a syllable.
std::string_view devanagari_sign(char32_t cp) {
  switch (cp) {
    case 0x0901: return "n";  // chandrabindu
    case 0x0902: return "m";  // anusvara
    case 0x0903: return "h";  // visarga
    case 0x0950: return "om";
    case 0x0964: return ".";
    case 0x0965: return ".";
    case 0x0970: return ".";
    default: break;
  }
  if (cp >= 0x0966 && cp <= 0x096F) {
    static constexpr std::string_view kDigits = "0123456789";
    return kDigits.substr(cp - 0x0966, 1);
  }
  return {};
}

bool in_devanagari_block(char32_t cp) { return cp >= 0x0900 && cp <= 0x097F; }

}  // namespace

bool is_hangul_syllable(char32_t cp) {
  return cp >= kHangulBase && cp <= kHangulLast;
}

JamoTriple decompose_hangul(char32_t syllable) {
  if (!is_hangul_syllable(syllable)) {
    throw Error(ErrorCategory::kInvalidArgument,
                "not a precomposed Hangul syllable: " + codepoint_label(syllable));
  }
  int offset = static_cast<int>(syllable - kHangulBase);
  return {offset / (kMedialCount * kFinalCount),
          (offset / kFinalCount) % kMedialCount, offset % kFinalCount};
}

char32_t compose_hangul(const JamoTriple& jamo) {
  if (jamo.initial < 0 || jamo.initial >= kInitialCount || jamo.medial < 0 ||
      jamo.medial >= kMedialCount || jamo.final < 0 ||
      jamo.final >= kFinalCount) {
    throw Error(ErrorCategory::kInvalidArgument, "jamo index out of range");
  }
  return kHangulBase +
         static_cast<char32_t>((jamo.initial * kMedialCount + jamo.medial) *
                                   kFinalCount +
                               jamo.final);
}

Romanization romanize_hangul(std::string_view input) {
  Romanization out;
  for (char32_t cp : text::decode_utf8(input)) {
    if (!is_hangul_syllable(cp)) {
      text::append_utf8(out.text, cp);
      continue;
    }
    JamoTriple j = decompose_hangul(cp);
    out.text += kInitials[j.initial];
    out.text += kMedials[j.medial];
    out.text += kFinals[j.final];
  }
  return out;
}

Romanization romanize_katakana(std::string_view input) {
  Romanization out;
  std::u32string s = text::decode_utf8(input);
  size_t i = 0;
  while (i < s.size()) {
    char32_t cp = s[i];
    if (cp == kSokuon) {
      size_t j = i + 1;
      if (j < s.size() && is_base_kana(s[j])) {
        std::string unit = katakana_unit(s, j);
        if (!unit.empty() && !is_vowel_letter(unit[0]) && unit[0] != 'n') {
          out.text += unit.rfind("ch", 0) == 0 ? 't' : unit[0];
          out.text += unit;
          i = j;
          continue;
        }
      }
      out.issues.push_back("orphan sokuon at position " + std::to_string(i));
      text::append_utf8(out.text, cp);
      ++i;
      continue;
    }
    if (cp == kChoonpu) {
      if (!out.text.empty() && is_vowel_letter(out.text.back())) {
        out.text.push_back(out.text.back());
      } else {
        out.issues.push_back("orphan long-vowel mark at position " +
                             std::to_string(i));
        text::append_utf8(out.text, cp);
      }
      ++i;
      continue;
    }
    if (is_base_kana(cp)) {
      out.text += katakana_unit(s, i);
      continue;
    }
    if (in_katakana_table(cp)) {
      // small kana without a host syllable
      out.text += kana(cp);
      ++i;
      continue;
    }
    text::append_utf8(out.text, cp);
    ++i;
  }
  return out;
}

Romanization romanize_devanagari(std::string_view input) {
  Romanization out;
  std::u32string s = text::decode_utf8(input);
  size_t i = 0;
  while (i < s.size()) {
    char32_t cp = s[i];
    std::string_view cons = devanagari_consonant(cp);
    if (!cons.empty()) {
      size_t j = i + 1;
      if (j < s.size() && s[j] == kNukta) {
        cons = devanagari_nukta_form(cp);
        ++j;
      }
      out.text += cons;
      if (j < s.size() && s[j] == kVirama) {
        ++j;
      } else if (j < s.size() && !devanagari_matra(s[j]).empty()) {
        out.text += devanagari_matra(s[j]);
        ++j;
      } else {
        out.text += 'a';
      }
      i = j;
      continue;
    }
    if (auto v = devanagari_vowel(cp); !v.empty()) {
      out.text += v;
    } else if (auto sign = devanagari_sign(cp); !sign.empty()) {
      out.text += sign;
    } else if (in_devanagari_block(cp)) {
      out.issues.push_back("unmapped " + codepoint_label(cp) + " at position " +
                           std::to_string(i));
      text::append_utf8(out.text, cp);
    } else {
      text::append_utf8(out.text, cp);
    }
    ++i;
  }
  return out;
}

Script parse_script(std::string_view id) {
  std::string lower = text::ascii_lower(id);
  if (lower == "ko" || lower == "korean" || lower == "hangul") {
    return Script::kHangul;
  }
  if (lower == "ja" || lower == "japanese" || lower == "katakana") {
    return Script::kKatakana;
  }
  if (lower == "hi" || lower == "hindi" || lower == "devanagari") {
    return Script::kDevanagari;
  }
  throw Error(ErrorCategory::kInvalidArgument,
              "unknown script '" + std::string(id) + "'");
}

Romanization romanize(Script script, std::string_view text) {
  switch (script) {
    case Script::kHangul: return romanize_hangul(text);
    case Script::kKatakana: return romanize_katakana(text);
    case Script::kDevanagari: return romanize_devanagari(text);
  }
  return {};
}

}  // namespace accentkit::romanizer
