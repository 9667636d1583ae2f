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

#include "accentkit/g2p.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <utility>

#include "accentkit/error.h"
#include "accentkit/text.h"

namespace accentkit::g2p {
namespace {

struct ArpabetEntry {
  std::string_view arpa;
  std::string_view ipa;
  bool vowel;
};

constexpr std::array<ArpabetEntry, 39> kArpabet = {{
    {"AA", "ɑ", true},   {"AE", "æ", true},   {"AH", "ʌ", true},
    {"AO", "ɔ", true},   {"AW", "aʊ", true},  {"AY", "aɪ", true},
    {"B", "b", false},   {"CH", "tʃ", false}, {"D", "d", false},
    {"DH", "ð", false},  {"EH", "ɛ", true},   {"ER", "ɝ", true},
    {"EY", "eɪ", true},  {"F", "f", false},   {"G", "ɡ", false},
    {"HH", "h", false},  {"IH", "ɪ", true},   {"IY", "i", true},
    {"JH", "dʒ", false}, {"K", "k", false},   {"L", "l", false},
    {"M", "m", false},   {"N", "n", false},   {"NG", "ŋ", false},
    {"OW", "oʊ", true},  {"OY", "ɔɪ", true},  {"P", "p", false},
    {"R", "ɹ", false},   {"S", "s", false},   {"SH", "ʃ", false},
    {"T", "t", false},   {"TH", "θ", false},  {"UH", "ʊ", true},
    {"UW", "u", true},   {"V", "v", false},   {"W", "w", false},
    {"Y", "j", false},   {"Z", "z", false},   {"ZH", "ʒ", false},
}};

const ArpabetEntry* find_arpabet(std::string_view base) {
  for (const auto& e : kArpabet) {
    if (e.arpa == base) return &e;
  }
  return nullptr;
}

// Splits "OW1" into ("OW", 1). Stress is -1 when no digit is present.
std::pair<std::string_view, int> split_stress(std::string_view phone) {
  if (!phone.empty() && phone.back() >= '0' && phone.back() <= '9') {
    return {phone.substr(0, phone.size() - 1), phone.back() - '0'};
  }
  return {phone, -1};
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

LexiconFormat parse_lexicon_format(std::string_view id) {
  std::string lower = text::ascii_lower(id);
  if (lower == "cmudict" || lower == "arpabet") return LexiconFormat::kCmuDict;
  throw Error(ErrorCategory::kInvalidArgument,
              "unknown lexicon format '" + std::string(id) + "'");
}

std::string normalize_word(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (size_t i = 0; i < word.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK
    if (word.substr(i, 3) == "\xE2\x80\x99") {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(word[i]);
  }
  return text::ascii_lower(out);
}

Lexicon Lexicon::load(const std::filesystem::path& path, LexiconFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCategory::kIo,
                "cannot read lexicon file '" + path.string() + "'");
  }
  return parse(in, format, path.string());
}

Lexicon Lexicon::parse(std::istream& in, LexiconFormat format,
                       std::string_view source_name) {
  (void)format;  // only one format today
  Lexicon lex;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = text::trim(line);
    if (body.empty() || starts_with(body, ";;;")) continue;

    auto fields = text::split_whitespace(body);
    if (fields.size() < 2) {
      lex.diagnostics_.push_back({line_no, "missing pronunciation"});
      continue;
    }
    std::string word = fields[0];
    // WORD(2) variant suffix
    if (word.size() > 3 && word.back() == ')') {
      auto open = word.rfind('(');
      if (open != std::string::npos && open > 0) {
        std::string_view digits(word.data() + open + 1, word.size() - open - 2);
        bool numeric = !digits.empty() &&
                       std::all_of(digits.begin(), digits.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
        if (numeric) word.resize(open);
      }
    }

    Pronunciation phones;
    for (size_t i = 1; i < fields.size(); ++i) {
      auto [base, stress] = split_stress(fields[i]);
      if (!is_arpabet_symbol(base) || stress > 2) {
        throw Error(ErrorCategory::kParse,
                    std::string(source_name) + ":" + std::to_string(line_no) +
                        ": unknown phone symbol '" + fields[i] + "'");
      }
      phones.push_back(fields[i]);
    }
    lex.entries_[normalize_word(word)].push_back(std::move(phones));
  }
  if (lex.entries_.empty()) {
    throw Error(ErrorCategory::kParse, std::string(source_name) +
                                           ": zero valid entries");
  }
  return lex;
}

const std::vector<Lexicon::Pronunciation>* Lexicon::find(
    std::string_view word) const {
  auto it = entries_.find(normalize_word(word));
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& arpabet_symbols() {
  static const std::vector<std::string> symbols = [] {
    std::vector<std::string> out;
    for (const auto& e : kArpabet) out.emplace_back(e.arpa);
    return out;
  }();
  return symbols;
}

bool is_arpabet_symbol(std::string_view base) {
  return find_arpabet(base) != nullptr;
}

std::string arpabet_to_ipa(std::string_view phone) {
  auto [base, stress] = split_stress(phone);
  const ArpabetEntry* e = find_arpabet(base);
  if (e == nullptr) {
    throw Error(ErrorCategory::kParse,
                "unknown ARPAbet phone '" + std::string(phone) + "'");
  }
  if (stress == 0 && base == "AH") return "ə";
  if (stress == 0 && base == "ER") return "ɚ";
  return std::string(e->ipa);
}

const std::vector<std::string>& ipa_inventory() {
  static const std::vector<std::string> inventory = [] {
    std::vector<std::string> out;
    for (const auto& e : kArpabet) out.emplace_back(e.ipa);
    out.emplace_back("ə");
    out.emplace_back("ɚ");
    return out;
  }();
  return inventory;
}

bool is_ipa_vowel(std::string_view phone) {
  if (phone == "ə" || phone == "ɚ") return true;
  for (const auto& e : kArpabet) {
    if (e.ipa == phone) return e.vowel;
  }
  return false;
}

std::string PhonemeSequence::render() const {
  std::string out;
  for (size_t i = 0; i < phones.size(); ++i) {
    if (stress_index && *stress_index == i) out += kStressMark;
    out += phones[i];
  }
  return out;
}

PhonemeSequence PhonemeSequence::parse_rendered(std::string word,
                                                std::string_view rendered) {
  PhonemeSequence seq;
  seq.word = std::move(word);
  const auto& inventory = ipa_inventory();
  bool pending_stress = false;
  size_t i = 0;
  while (i < rendered.size()) {
    if (rendered.substr(i, kStressMark.size()) == kStressMark) {
      if (seq.stress_index || pending_stress) {
        throw Error(ErrorCategory::kParse, "more than one stress mark in '" +
                                               std::string(rendered) + "'");
      }
      pending_stress = true;
      i += kStressMark.size();
      continue;
    }
    const std::string* best = nullptr;
    for (const auto& sym : inventory) {
      if (rendered.substr(i, sym.size()) == sym &&
          (best == nullptr || sym.size() > best->size())) {
        best = &sym;
      }
    }
    if (best == nullptr) {
      throw Error(ErrorCategory::kParse, "unknown IPA symbol at byte " +
                                             std::to_string(i) + " of '" +
                                             std::string(rendered) + "'");
    }
    if (pending_stress) {
      if (!is_ipa_vowel(*best)) {
        throw Error(ErrorCategory::kParse,
                    "stress mark not followed by a vowel in '" +
                        std::string(rendered) + "'");
      }
      seq.stress_index = seq.phones.size();
      pending_stress = false;
    }
    seq.phones.push_back(*best);
    i += best->size();
  }
  if (pending_stress) {
    throw Error(ErrorCategory::kParse,
                "dangling stress mark in '" + std::string(rendered) + "'");
  }
  if (seq.phones.empty()) {
    throw Error(ErrorCategory::kParse, "empty phone sequence");
  }
  return seq;
}

PhonemeSequence phonemize_word(const Lexicon& lexicon, std::string_view word) {
  if (normalize_word(word).empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "empty word");
  }
  const auto* prons = lexicon.find(word);
  if (prons == nullptr) throw OovError({std::string(word)});

  const auto& arpa = prons->front();
  PhonemeSequence seq;
  seq.word = std::string(word);
  for (const auto& phone : arpa) {
    auto [base, stress] = split_stress(phone);
    (void)base;
    if (stress == 1 && !seq.stress_index) seq.stress_index = seq.phones.size();
    seq.phones.push_back(arpabet_to_ipa(phone));
  }
  return seq;
}

namespace {

bool is_leading_punct(char c) {
  return c == '"' || c == '(' || c == '[' || c == '{' || c == '`';
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' ||
         c == ':' || c == '"' || c == ')' || c == ']' || c == '}';
}

bool is_sentence_mark(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

TokenizedSentence tokenize_sentence(std::string_view text) {
  TokenizedSentence out;
  for (const auto& raw : text::split_whitespace(text)) {
    std::string_view w = raw;
    while (!w.empty() && is_leading_punct(w.front())) w.remove_prefix(1);
    // Typographic double quotes are three bytes in UTF-8.
    while (w.size() >= 3 && (w.substr(0, 3) == "\xE2\x80\x9C")) w.remove_prefix(3);
    std::string_view trail_chars;
    size_t end = w.size();
    while (end > 0 && (is_trailing_punct(w[end - 1]) ||
                       (end >= 3 && w.substr(end - 3, 3) == "\xE2\x80\x9D"))) {
      end -= is_trailing_punct(w[end - 1]) ? 1 : 3;
    }
    trail_chars = w.substr(end);
    w = w.substr(0, end);

    // Keep the first meaningful mark (",", ";", ":", ".", "!", "?").
    std::string mark;
    for (char c : trail_chars) {
      if (c == ',' || c == ';' || c == ':' || is_sentence_mark(c)) {
        mark = std::string(1, c);
        break;
      }
    }
    if (w.empty()) {
      // Free-standing punctuation attaches to the previous word.
      if (!out.tokens.empty() && out.tokens.back().trailing.empty()) {
        out.tokens.back().trailing = mark;
      }
      continue;
    }
    out.tokens.push_back({std::string(w), mark});
  }
  if (!out.tokens.empty() && !out.tokens.back().trailing.empty() &&
      is_sentence_mark(out.tokens.back().trailing[0])) {
    out.terminal = out.tokens.back().trailing;
    out.tokens.back().trailing.clear();
  } else if (!out.tokens.empty()) {
    out.tokens.back().trailing.clear();
  }
  return out;
}

PhonemizedSentence phonemize_sentence(const Lexicon& lexicon,
                                      std::string_view text) {
  if (text::trim(text).empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "empty sentence");
  }
  TokenizedSentence tokenized = tokenize_sentence(text);
  if (tokenized.tokens.empty()) {
    throw Error(ErrorCategory::kInvalidArgument, "sentence has no words");
  }
  PhonemizedSentence out;
  out.terminal = tokenized.terminal;
  for (auto& tok : tokenized.tokens) {
    PhonemizedToken pt{tok, std::nullopt};
    try {
      pt.phonemes = phonemize_word(lexicon, tok.word);
    } catch (const OovError&) {
      out.oov.push_back(tok.word);
    }
    out.tokens.push_back(std::move(pt));
  }
  if (out.oov.size() == out.tokens.size()) throw OovError(out.oov);
  return out;
}

}  // namespace accentkit::g2p
