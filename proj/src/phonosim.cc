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

#include "accentkit/phonosim.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "accentkit/error.h"
#include "accentkit/text.h"

namespace accentkit::phonosim {
namespace {

using K = PhoneKey;

struct IpaRule {
  std::string_view ipa;
  std::array<PhoneKey, 2> keys;
  int count;
};

constexpr IpaRule kIpaRules[] = {
    {"ɑ", {K::kA}, 1},       {"æ", {K::kA}, 1},       {"ʌ", {K::kA}, 1},
    {"a", {K::kA}, 1},       {"ɛ", {K::kE}, 1},       {"e", {K::kE}, 1},
    {"eɪ", {K::kE}, 1},      {"ɪ", {K::kI}, 1},       {"i", {K::kI}, 1},
    {"ɔ", {K::kO}, 1},       {"o", {K::kO}, 1},       {"oʊ", {K::kO}, 1},
    {"ʊ", {K::kU}, 1},       {"u", {K::kU}, 1},       {"ə", {K::kSchwa}, 1},
    {"ɚ", {K::kSchwa}, 1},   {"ɝ", {K::kSchwa}, 1},   {"aʊ", {K::kA, K::kU}, 2},
    {"aɪ", {K::kA, K::kI}, 2}, {"ɔɪ", {K::kO, K::kI}, 2},
    {"p", {K::kP}, 1},       {"b", {K::kB}, 1},       {"t", {K::kT}, 1},
    {"d", {K::kD}, 1},       {"k", {K::kK}, 1},       {"ɡ", {K::kG}, 1},
    {"g", {K::kG}, 1},       {"tʃ", {K::kCh}, 1},     {"dʒ", {K::kCh}, 1},
    {"s", {K::kS}, 1},       {"z", {K::kZ}, 1},       {"ʃ", {K::kSh}, 1},
    {"ʒ", {K::kSh}, 1},      {"θ", {K::kTh}, 1},      {"ð", {K::kTh}, 1},
    {"f", {K::kFv}, 1},      {"v", {K::kFv}, 1},      {"h", {K::kH}, 1},
    {"m", {K::kM}, 1},       {"n", {K::kN}, 1},       {"ŋ", {K::kN}, 1},
    {"l", {K::kLr}, 1},      {"ɹ", {K::kLr}, 1},      {"r", {K::kLr}, 1},
    {"ɾ", {K::kLr}, 1},      {"w", {K::kW}, 1},       {"j", {K::kJ}, 1},
};

const IpaRule* find_ipa_rule(std::string_view phone) {
  for (const auto& r : kIpaRules) {
    if (r.ipa == phone) return &r;
  }
  return nullptr;
}

struct RomanRule {
  std::string_view roman;
  std::array<PhoneKey, 2> keys;
  int count;
};

// Longest entries first.
constexpr RomanRule kRomanRules[] = {
    {"tch", {K::kCh}, 1}, {"chh", {K::kCh}, 1},
    {"ch", {K::kCh}, 1},  {"sh", {K::kSh}, 1},  {"ts", {K::kTs}, 1},
    {"th", {K::kT}, 1},   {"kh", {K::kK}, 1},   {"gh", {K::kG}, 1},
    {"jh", {K::kCh}, 1},  {"dh", {K::kD}, 1},   {"ph", {K::kP}, 1},
    {"bh", {K::kB}, 1},   {"rh", {K::kLr}, 1},  {"ng", {K::kN}, 1},
    {"eu", {K::kSchwa}, 1}, {"eo", {K::kSchwa}, 1}, {"ae", {K::kE}, 1},
    {"oe", {K::kE}, 1},
    {"a", {K::kA}, 1},    {"e", {K::kE}, 1},    {"i", {K::kI}, 1},
    {"o", {K::kO}, 1},    {"u", {K::kU}, 1},    {"b", {K::kB}, 1},
    {"c", {K::kK}, 1},    {"d", {K::kD}, 1},    {"f", {K::kFv}, 1},
    {"g", {K::kG}, 1},    {"h", {K::kH}, 1},    {"j", {K::kCh}, 1},
    {"k", {K::kK}, 1},    {"l", {K::kLr}, 1},   {"m", {K::kM}, 1},
    {"n", {K::kN}, 1},    {"p", {K::kP}, 1},    {"q", {K::kK}, 1},
    {"r", {K::kLr}, 1},   {"s", {K::kS}, 1},    {"t", {K::kT}, 1},
    {"v", {K::kFv}, 1},   {"w", {K::kW}, 1},    {"x", {K::kK, K::kS}, 2},
    {"y", {K::kJ}, 1},    {"z", {K::kZ}, 1},
};

bool is_epenthetic(PhoneKey k) {
  return k == K::kU || k == K::kSchwa || k == K::kI;
}

}  // namespace

KeyGroup group_of(PhoneKey k) {
  switch (k) {
    case K::kP: case K::kB: case K::kT: case K::kD: case K::kK: case K::kG:
      return KeyGroup::kStop;
    case K::kTs: case K::kCh:
      return KeyGroup::kAffricate;
    case K::kS: case K::kZ: case K::kSh: case K::kTh: case K::kFv: case K::kH:
      return KeyGroup::kFricative;
    case K::kM: case K::kN:
      return KeyGroup::kNasal;
    case K::kLr: case K::kW: case K::kJ:
      return KeyGroup::kApproximant;
    case K::kE: case K::kI:
      return KeyGroup::kFrontVowel;
    case K::kA: case K::kO: case K::kU: case K::kSchwa:
      return KeyGroup::kBackVowel;
  }
  return KeyGroup::kStop;
}

bool is_vowel_key(PhoneKey k) {
  auto g = group_of(k);
  return g == KeyGroup::kFrontVowel || g == KeyGroup::kBackVowel;
}

std::string_view key_name(PhoneKey k) {
  static constexpr std::array<std::string_view, kPhoneKeyCount> kNames = {
      "p", "b",  "t", "d", "k", "g", "ts", "tʃ", "s", "z", "ʃ", "θ", "f/v",
      "h", "m",  "n", "l/r", "w", "j", "a", "e", "i", "o", "u", "ə"};
  return kNames[static_cast<size_t>(k)];
}

std::string format_keys(const PhoneKeySeq& keys) {
  std::string out = "[";
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ", ";
    out += key_name(keys[i]);
  }
  return out + "]";
}

PhoneKeySeq keys_from_ipa(const g2p::PhonemeSequence& seq) {
  if (seq.phones.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "empty phone sequence");
  }
  PhoneKeySeq out;
  for (const auto& phone : seq.phones) {
    const IpaRule* rule = find_ipa_rule(phone);
    if (rule == nullptr) {
      throw Error(ErrorCategory::kParse,
                  "unmapped IPA symbol '" + phone + "'");
    }
    for (int i = 0; i < rule->count; ++i) {
      PhoneKey k = rule->keys[i];
      if (k == K::kS && !out.empty() && out.back() == K::kT) {
        out.back() = K::kTs;
      } else {
        out.push_back(k);
      }
    }
  }
  return out;
}

PhoneKeySeq keys_from_ipa_text(std::string_view rendered_ipa) {
  if (text::trim(rendered_ipa).empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "empty IPA string");
  }
  return keys_from_ipa(
      g2p::PhonemeSequence::parse_rendered("", text::trim(rendered_ipa)));
}

PhoneKeySeq keys_from_roman(std::string_view roman) {
  std::string s = text::ascii_lower(roman);
  PhoneKeySeq out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '-' || c == '\'') {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) && i + 1 < s.size() &&
        s[i + 1] == c) {
      ++i;  // doubled letter collapses onto its second copy
      continue;
    }
    const RomanRule* best = nullptr;
    for (const auto& r : kRomanRules) {
      if (std::string_view(s).substr(i, r.roman.size()) == r.roman) {
        best = &r;
        break;
      }
    }
    if (best == nullptr) {
      throw Error(ErrorCategory::kParse,
                  "untokenizable residue '" + s.substr(i) + "' in '" +
                      std::string(roman) + "'");
    }
    for (int k = 0; k < best->count; ++k) out.push_back(best->keys[k]);
    i += best->roman.size();
  }
  return out;
}

double edit_cost(const PhoneKeySeq& a, const PhoneKeySeq& b,
                 const SimilarityCosts& costs) {
  const size_t n = a.size();
  const size_t m = b.size();
  auto indel = [&](const PhoneKeySeq& s, size_t i) {
    if (i + 1 == s.size() && is_epenthetic(s[i])) {
      return std::min(costs.final_epenthesis, costs.indel);
    }
    return costs.indel;
  };
  auto sub = [&](PhoneKey x, PhoneKey y) {
    if (x == y) return 0.0;
    return group_of(x) == group_of(y) ? costs.within_group : costs.cross_group;
  };
  std::vector<double> prev(m + 1), cur(m + 1);
  prev[0] = 0.0;
  for (size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + indel(b, j - 1);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] + indel(a, i - 1);
    for (size_t j = 1; j <= m; ++j) {
      cur[j] = std::min({prev[j - 1] + sub(a[i - 1], b[j - 1]),
                         prev[j] + indel(a, i - 1),
                         cur[j - 1] + indel(b, j - 1)});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double similarity(const PhoneKeySeq& a, const PhoneKeySeq& b,
                  const SimilarityCosts& costs) {
  size_t norm = std::max(a.size(), b.size());
  if (norm == 0) return 1.0;
  double s = 1.0 - edit_cost(a, b, costs) / static_cast<double>(norm);
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace accentkit::phonosim
