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

// Pronunciation lexicon loading and dictionary-based phonemization.
//
// The lexicon is an ARPAbet dictionary in the familiar CMUdict line format:
//
//   ;;; comment
//   GO  G OW1
//   A  AH0
//   A(2)  EY1
//
// Phonemized words are rendered in IPA with a single primary-stress mark
// placed immediately before the stressed vowel ("ɡˈoʊ").

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace accentkit::g2p {

enum class LexiconFormat { kCmuDict };

// Accepts "cmudict" (also "arpabet").
LexiconFormat parse_lexicon_format(std::string_view id);

struct LexiconDiagnostic {
  std::size_t line = 0;
  std::string message;
};

// Lowercase with apostrophes preserved; typographic apostrophes fold to '.
std::string normalize_word(std::string_view word);

class Lexicon {
 public:
  using Pronunciation = std::vector<std::string>;  // ARPAbet, with stress digits

  static Lexicon load(const std::filesystem::path& path, LexiconFormat format);
  static Lexicon parse(std::istream& in, LexiconFormat format,
                       std::string_view source_name = "<stream>");

  // Case-insensitive. Returns nullptr when absent.
  const std::vector<Pronunciation>* find(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  std::string_view alphabet_id() const { return "arpabet"; }

  // Malformed lines skipped during parsing, with 1-based line numbers.
  const std::vector<LexiconDiagnostic>& diagnostics() const {
    return diagnostics_;
  }

 private:
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
  std::vector<LexiconDiagnostic> diagnostics_;
};

// The 39 ARPAbet base symbols.
const std::vector<std::string>& arpabet_symbols();
bool is_arpabet_symbol(std::string_view base);

// Maps one ARPAbet phone (optionally carrying a 0/1/2 stress digit) to IPA.
// AH and ER reduce to ə / ɚ when unstressed.
std::string arpabet_to_ipa(std::string_view phone);

// Every IPA symbol arpabet_to_ipa can produce.
const std::vector<std::string>& ipa_inventory();
bool is_ipa_vowel(std::string_view phone);

inline constexpr std::string_view kStressMark = "\xCB\x88";  // U+02C8 ˈ

struct PhonemeSequence {
  std::string word;
  std::vector<std::string> phones;  // IPA symbols
  std::optional<std::size_t> stress_index;

  std::string render() const;

  // Inverse of render(): greedy longest-match over ipa_inventory().
  static PhonemeSequence parse_rendered(std::string word,
                                        std::string_view rendered);

  bool operator==(const PhonemeSequence&) const = default;
};

// Throws OovError when the word is not in the lexicon.
PhonemeSequence phonemize_word(const Lexicon& lexicon, std::string_view word);

struct SentenceToken {
  std::string word;      // surface form, punctuation stripped
  std::string trailing;  // punctuation that followed the word inside the sentence
};

struct TokenizedSentence {
  std::vector<SentenceToken> tokens;
  std::string terminal;  // ".", "?", "!" or empty
};

// Whitespace tokenization with surrounding punctuation peeled off. Trailing
// punctuation on the final word is recorded as the terminal mark.
TokenizedSentence tokenize_sentence(std::string_view text);

struct PhonemizedToken {
  SentenceToken token;
  std::optional<PhonemeSequence> phonemes;  // absent when OOV
};

struct PhonemizedSentence {
  std::vector<PhonemizedToken> tokens;
  std::string terminal;
  std::vector<std::string> oov;  // in sentence order
};

// Per-token OOV failures are collected; throws OovError only when every
// token is out of vocabulary.
PhonemizedSentence phonemize_sentence(const Lexicon& lexicon,
                                      std::string_view text);

}  // namespace accentkit::g2p
