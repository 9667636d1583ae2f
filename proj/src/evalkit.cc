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

#include "accentkit/evalkit.h"

#include <unicode/uchar.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "accentkit/error.h"
#include "accentkit/text.h"

namespace accentkit::evalkit {
namespace {

using text::decode_utf8;
using text::encode_utf8;
using text::split;
using text::split_whitespace;
using text::trim;

std::vector<std::pair<std::string, std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path.string());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCategory::kParse,
                  path.string() + ":" + std::to_string(lineno) + ": expected id<TAB>value");
    }
    std::string id(trim(std::string_view(line).substr(0, tab)));
    std::string value(trim(std::string_view(line).substr(tab + 1)));
    rows.emplace_back(std::move(id), std::move(value));
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCategory::kParse, where + ": not a number: " + s);
  }
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::string normalize_transcript(std::string_view s, const NormalizeOptions& opts) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t c : decode_utf8(s)) {
    if (c == U'’' || c == U'‘' || c == U'ʼ') c = U'\'';
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (opts.strip_punctuation && c != U'\'' && u_ispunct(static_cast<UChar32>(c))) {
      // "well-known" splits into two tokens rather than fusing.
      if (c == U'-' || c == U'/') pending_space = !out.empty();
      continue;
    }
    if (opts.lowercase) c = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return encode_utf8(out);
}

double EditCounts::rate() const {
  if (ref_length == 0) throw Error(ErrorCategory::kInvalidArgument, "empty reference");
  return static_cast<double>(edits()) / static_cast<double>(ref_length);
}

EditCounts& EditCounts::operator+=(const EditCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_length += o.ref_length;
  return *this;
}

template <typename T>
EditCounts align(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<size_t> d((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> size_t& { return d[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts e;
  e.ref_length = n;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++e.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++e.deletions;
      --i;
    } else {
      ++e.insertions;
      --j;
    }
  }
  return e;
}

template EditCounts align<std::string>(const std::vector<std::string>&,
                                       const std::vector<std::string>&);
template EditCounts align<char32_t>(const std::vector<char32_t>&, const std::vector<char32_t>&);

EditCounts wer(std::string_view ref, std::string_view hyp, const NormalizeOptions& opts) {
  auto r = split_whitespace(normalize_transcript(ref, opts));
  if (r.empty()) throw Error(ErrorCategory::kInvalidArgument, "empty reference");
  return align(r, split_whitespace(normalize_transcript(hyp, opts)));
}

EditCounts cer(std::string_view ref, std::string_view hyp, const NormalizeOptions& opts) {
  auto r = decode_utf8(normalize_transcript(ref, opts));
  if (r.empty()) throw Error(ErrorCategory::kInvalidArgument, "empty reference");
  auto h = decode_utf8(normalize_transcript(hyp, opts));
  return align(std::vector<char32_t>(r.begin(), r.end()), std::vector<char32_t>(h.begin(), h.end()));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCategory::kInvalidArgument,
                "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCategory::kInvalidArgument, "zero vector");
  if (!std::isfinite(na) || !std::isfinite(nb)) {
    throw Error(ErrorCategory::kInvalidArgument, "non-finite embedding");
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += (a[i] / na) * (b[i] / nb);
  return std::clamp(dot, -1.0, 1.0);
}

double aecs_diff(std::span<const double> converted, std::span<const double> accented,
                 std::span<const double> native) {
  return cosine(converted, accented) - cosine(converted, native);
}

double aggregate_probs(std::span<const double> probs) {
  if (probs.empty()) throw Error(ErrorCategory::kInvalidArgument, "no probabilities");
  double s = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCategory::kInvalidArgument, "probability out of range: " + std::to_string(p));
    }
    s += p;
  }
  return s / static_cast<double>(probs.size());
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::map<std::string, std::string> load_text_sidecar(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for (auto& [id, v] : read_tsv(path)) out[id] = v;
  return out;
}

std::map<std::string, std::vector<double>> load_vector_sidecar(const std::filesystem::path& path) {
  std::map<std::string, std::vector<double>> out;
  for (auto& [id, v] : read_tsv(path)) {
    std::vector<double> vec;
    for (const auto& part : split(v, ',')) {
      vec.push_back(parse_double(std::string(trim(part)), path.string() + ":" + id));
    }
    out[id] = std::move(vec);
  }
  return out;
}

std::map<std::string, double> load_prob_sidecar(const std::filesystem::path& path) {
  std::map<std::string, double> out;
  for (auto& [id, v] : read_tsv(path)) {
    const double p = parse_double(v, path.string() + ":" + id);
    if (p < 0.0 || p > 1.0) throw Error(ErrorCategory::kParse, path.string() + ":" + id + ": not in [0,1]");
    out[id] = p;
  }
  return out;
}

MetricReport evaluate(const EvalInputs& in) {
  std::set<std::string> ids;
  for (const auto& [id, _] : in.hypotheses) ids.insert(id);
  for (const auto& [id, _] : in.probs) ids.insert(id);
  auto role_prefix = [&](const auto& m) {
    for (const auto& [key, _] : m) {
      const auto colon = key.rfind(':');
      if (colon != std::string::npos) ids.insert(key.substr(0, colon));
    }
  };
  role_prefix(in.accent_embeddings);
  role_prefix(in.speaker_embeddings);

  auto find = [](const auto& m, const std::string& key) -> const std::vector<double>* {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  };

  MetricReport rep;
  EditCounts words, chars;
  double wer_sum = 0, cer_sum = 0;
  std::vector<double> probs;
  double aecs_sum = 0, secs_sum = 0;
  for (const auto& id : ids) {
    UtteranceRow row;
    row.utt_id = id;
    auto ref = in.references.find(id);
    auto hyp = in.hypotheses.find(id);
    if (ref != in.references.end() && hyp != in.hypotheses.end()) {
      try {
        row.word = wer(ref->second, hyp->second, in.normalize);
        row.chr = cer(ref->second, hyp->second, in.normalize);
      } catch (const Error& e) {
        throw Error(e.category(), id + ": " + e.what());
      }
      words += *row.word;
      chars += *row.chr;
      wer_sum += row.word->rate();
      cer_sum += row.chr->rate();
      ++rep.wer_mean.n;
    }
    if (auto p = in.probs.find(id); p != in.probs.end()) {
      row.prob = p->second;
      probs.push_back(p->second);
    }
    const auto* conv = find(in.accent_embeddings, id + ":converted");
    const auto* acc = find(in.accent_embeddings, id + ":accented");
    const auto* nat = find(in.accent_embeddings, id + ":native");
    if (conv && acc && nat) {
      row.aecs_diff = aecs_diff(*conv, *acc, *nat);
      aecs_sum += *row.aecs_diff;
      ++rep.aecs_diff_mean.n;
    }
    const auto* sconv = find(in.speaker_embeddings, id + ":converted");
    const auto* ssrc = find(in.speaker_embeddings, id + ":source");
    if (sconv && ssrc) {
      row.secs = cosine(*sconv, *ssrc);
      secs_sum += *row.secs;
      ++rep.secs_mean.n;
    }
    rep.rows.push_back(std::move(row));
  }
  if (rep.wer_mean.n > 0) {
    const auto n = static_cast<double>(rep.wer_mean.n);
    rep.wer_pooled = {rep.wer_mean.n, words.rate()};
    rep.cer_pooled = {rep.wer_mean.n, chars.rate()};
    rep.wer_mean.value = wer_sum / n;
    rep.cer_mean = {rep.wer_mean.n, cer_sum / n};
  }
  if (!probs.empty()) rep.prob_mean = {probs.size(), aggregate_probs(probs)};
  if (rep.aecs_diff_mean.n > 0) {
    rep.aecs_diff_mean.value = aecs_sum / static_cast<double>(rep.aecs_diff_mean.n);
  }
  if (rep.secs_mean.n > 0) rep.secs_mean.value = secs_sum / static_cast<double>(rep.secs_mean.n);
  return rep;
}

nlohmann::json MetricReport::to_json() const {
  auto counts = [](const EditCounts& e) {
    return nlohmann::json{{"S", e.substitutions}, {"D", e.deletions}, {"I", e.insertions},
                          {"N", e.ref_length}, {"rate", e.rate()}};
  };
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"utt_id", r.utt_id}};
    if (r.word) j["wer"] = counts(*r.word);
    if (r.chr) j["cer"] = counts(*r.chr);
    if (r.prob) j["prob"] = *r.prob;
    if (r.aecs_diff) j["aecs_diff"] = *r.aecs_diff;
    if (r.secs) j["secs"] = *r.secs;
    rows_j.push_back(std::move(j));
  }
  auto summary = [](const MetricSummary& s) {
    return s.n ? nlohmann::json{{"n", s.n}, {"value", s.value}} : nlohmann::json(nullptr);
  };
  return {{"rows", rows_j},
          {"aggregate",
           {{"wer_pooled", summary(wer_pooled)},
            {"wer_mean", summary(wer_mean)},
            {"cer_pooled", summary(cer_pooled)},
            {"cer_mean", summary(cer_mean)},
            {"prob_mean", summary(prob_mean)},
            {"aecs_diff_mean", summary(aecs_diff_mean)},
            {"secs_mean", summary(secs_mean)}}}};
}

std::string MetricReport::table() const {
  std::ostringstream out;
  auto line = [&](const char* name, const MetricSummary& s, bool percent, int digits) {
    char buf[128];
    if (s.n == 0) {
      std::snprintf(buf, sizeof buf, "%-22s %10s %6s\n", name, "-", "0");
    } else {
      const std::string v = format_fixed(percent ? s.value * 100.0 : s.value, digits);
      std::snprintf(buf, sizeof buf, "%-22s %10s %6zu\n", name, v.c_str(), s.n);
    }
    out << buf;
  };
  char head[128];
  std::snprintf(head, sizeof head, "%-22s %10s %6s\n", "metric", "value", "n");
  out << head;
  line("WER % (pooled)", wer_pooled, true, 2);
  line("WER % (utt mean)", wer_mean, true, 2);
  line("CER % (pooled)", cer_pooled, true, 2);
  line("CER % (utt mean)", cer_mean, true, 2);
  line("Classification Prob.", prob_mean, false, 3);
  line("AECS Diff.", aecs_diff_mean, false, 3);
  line("SECS", secs_mean, false, 3);
  return out.str();
}

}  // namespace accentkit::evalkit
