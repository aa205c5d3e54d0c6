// Copyright 2026 The dialsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ROUGE-N / ROUGE-L / ROUGE-LSum and the tokenization rule every score uses.
//
// Tokenization: Unicode simple lowercase, every non-alphanumeric code point
// becomes a separator, split on separator runs. No stemming, no stopwords.

#pragma once

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dialsum/core.hpp"

namespace dialsum {

struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  auto begin() const noexcept { return tokens.begin(); }
  auto end() const noexcept { return tokens.end(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Appends the tokens of `text` to `out`. Ill-formed UTF-8 bytes act as
// separators.
inline void tokenize_into(std::string_view text,
                          std::vector<std::string>& out) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::string current;
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && u_isalnum(c)) {
      const UChar32 lower = u_tolower(c);
      char buf[U8_MAX_LENGTH];
      std::int32_t n = 0;
      U8_APPEND_UNSAFE(buf, n, lower);
      current.append(buf, static_cast<std::size_t>(n));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
}

inline TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  tokenize_into(text, seq.tokens);
  return seq;
}

// Precision/recall/F1 from a matched count and the two side totals. Every
// ROUGE variant funnels through here so that equal counts give bit-equal
// scores regardless of which code path produced them.
inline RougeScore score_from_counts(std::size_t matched,
                                    std::size_t candidate_total,
                                    std::size_t reference_total) noexcept {
  RougeScore s;
  if (candidate_total > 0) {
    s.precision = static_cast<double>(matched) /
                  static_cast<double>(candidate_total);
  }
  if (reference_total > 0) {
    s.recall = static_cast<double>(matched) /
               static_cast<double>(reference_total);
  }
  s.f1 = harmonic_f1(s.precision, s.recall);
  return s;
}

namespace detail {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Tokens are alphanumeric only, so a space cannot collide inside a key.
inline NgramCounts count_ngrams(const TokenSequence& seq, std::size_t n,
                                std::size_t& total) {
  NgramCounts counts;
  total = 0;
  if (n == 0 || seq.size() < n) return counts;
  total = seq.size() - n + 1;
  counts.reserve(total);
  std::string key;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back(' ');
      key += seq[i + k];
    }
    ++counts[key];
  }
  return counts;
}

inline std::size_t clipped_overlap(const NgramCounts& a,
                                   const NgramCounts& b) {
  const NgramCounts& small = a.size() <= b.size() ? a : b;
  const NgramCounts& large = a.size() <= b.size() ? b : a;
  std::size_t overlap = 0;
  for (const auto& [gram, count] : small) {
    if (auto it = large.find(gram); it != large.end()) {
      overlap += std::min(count, it->second);
    }
  }
  return overlap;
}

inline std::size_t lcs_length(std::span<const std::string> a,
                              std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Positions in `ref` covered by one LCS of (ref, cand). Backtracks from the
// end, taking a match whenever the last tokens agree and otherwise stepping
// along `cand` only when that strictly keeps a longer prefix LCS.
inline std::vector<std::size_t> lcs_positions(
    std::span<const std::string> ref, std::span<const std::string> cand) {
  const std::size_t rows = ref.size(), cols = cand.size();
  std::vector<std::size_t> table((rows + 1) * (cols + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return table[i * (cols + 1) + j];
  };
  for (std::size_t i = 1; i <= rows; ++i) {
    for (std::size_t j = 1; j <= cols; ++j) {
      at(i, j) = ref[i - 1] == cand[j - 1]
                     ? at(i - 1, j - 1) + 1
                     : std::max(at(i - 1, j), at(i, j - 1));
    }
  }
  std::vector<std::size_t> positions;
  std::size_t i = rows, j = cols;
  while (i > 0 && j > 0) {
    if (ref[i - 1] == cand[j - 1]) {
      positions.push_back(i - 1);
      --i;
      --j;
    } else if (at(i, j - 1) > at(i - 1, j)) {
      --j;
    } else {
      --i;
    }
  }
  std::reverse(positions.begin(), positions.end());
  return positions;
}

inline std::vector<TokenSequence> split_sentences(std::string_view text) {
  std::vector<TokenSequence> sentences;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    TokenSequence seq = tokenize(text.substr(start, end - start));
    if (!seq.empty()) sentences.push_back(std::move(seq));
    start = end + 1;
  }
  return sentences;
}

}  // namespace detail

// Clipped-count ROUGE-N. n must be >= 1; n == 0 yields all zeros.
inline RougeScore rouge_n(const TokenSequence& candidate,
                          const TokenSequence& reference, std::size_t n) {
  std::size_t cand_total = 0, ref_total = 0;
  const auto cand = detail::count_ngrams(candidate, n, cand_total);
  const auto ref = detail::count_ngrams(reference, n, ref_total);
  return score_from_counts(detail::clipped_overlap(cand, ref), cand_total,
                           ref_total);
}

inline RougeScore rouge_1(const TokenSequence& candidate,
                          const TokenSequence& reference) {
  return rouge_n(candidate, reference, 1);
}

// LCS-based ROUGE-L with beta = 1.
inline RougeScore rouge_l(const TokenSequence& candidate,
                          const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const std::size_t lcs =
      detail::lcs_length(candidate.tokens, reference.tokens);
  return score_from_counts(lcs, candidate.size(), reference.size());
}

// Summary-level ROUGE-L over newline-separated sentences. For each reference
// sentence the union of its LCS hits against every candidate sentence is
// collected; hits are then clipped by the token counts remaining on both
// sides so neither precision nor recall can exceed 1.
inline RougeScore rouge_l_sum(std::string_view candidate,
                              std::string_view reference) {
  const auto cand_sents = detail::split_sentences(candidate);
  const auto ref_sents = detail::split_sentences(reference);

  std::unordered_map<std::string, std::size_t> cand_counts, ref_counts;
  std::size_t cand_total = 0, ref_total = 0;
  for (const auto& s : cand_sents) {
    for (const auto& t : s) ++cand_counts[t];
    cand_total += s.size();
  }
  for (const auto& s : ref_sents) {
    for (const auto& t : s) ++ref_counts[t];
    ref_total += s.size();
  }
  if (cand_total == 0 || ref_total == 0) return {};

  std::size_t hits = 0;
  std::vector<char> covered;
  for (const auto& ref : ref_sents) {
    covered.assign(ref.size(), 0);
    for (const auto& cand : cand_sents) {
      for (const std::size_t pos :
           detail::lcs_positions(ref.tokens, cand.tokens)) {
        covered[pos] = 1;
      }
    }
    for (std::size_t pos = 0; pos < ref.size(); ++pos) {
      if (!covered[pos]) continue;
      auto& rc = ref_counts[ref[pos]];
      auto& cc = cand_counts[ref[pos]];
      if (rc > 0 && cc > 0) {
        ++hits;
        --rc;
        --cc;
      }
    }
  }
  return score_from_counts(hits, cand_total, ref_total);
}

// Overlapping bigrams divided by the target's bigram count.
inline double rouge2_recall(const TokenSequence& target,
                            const TokenSequence& document) {
  if (target.size() < 2) return 0.0;
  return rouge_n(document, target, 2).recall;
}

// "speaker: text" per turn (text only when no speaker or with_speaker is
// false), newline separated.
inline std::string join_turns(std::span<const Turn> turns,
                              bool with_speaker) {
  std::string out;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (i) out.push_back('\n');
    if (with_speaker && turns[i].speaker) {
      out += *turns[i].speaker;
      out += ": ";
    }
    out += turns[i].text;
  }
  return out;
}

}  // namespace dialsum
