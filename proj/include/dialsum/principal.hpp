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

// Principal selection: which dialogue turns become the extractive pseudo
// summary.
//
//  * GSG+ grows the set greedily, scoring the candidate set against the
//    helper summary with ROUGE-1 F1.
//  * GSG* scores each turn once against the rest of the dialogue and keeps
//    the top m.
//
// All scoring is on turn text only (speaker labels excluded). Ties go to the
// lowest turn index.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dialsum/core.hpp"
#include "dialsum/text_metrics.hpp"

namespace dialsum {

// round_half_up(ratio * turn_count) clamped to [1, turn_count - 1].
inline std::size_t compute_m(std::size_t turn_count, double compression_ratio) {
  if (turn_count < 2) {
    throw RangeError("compute_m: dialogue needs at least 2 turns, got " +
                     std::to_string(turn_count));
  }
  if (!(compression_ratio > 0.0 && compression_ratio < 1.0)) {
    throw RangeError("compute_m: compression ratio must lie in (0, 1)");
  }
  const double raw =
      std::floor(compression_ratio * static_cast<double>(turn_count) + 0.5);
  const auto m = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(m, turn_count - 1);
}

namespace detail {

// Per-dialogue token multisets over a local vocabulary. Summing bags is
// equivalent to tokenizing the newline join, so scores derived from these
// are identical to rouge_n on joined text.
class TurnBags {
 public:
  using Bag = std::vector<std::pair<std::size_t, std::size_t>>;  // (id, count)

  explicit TurnBags(const Dialogue& dialogue) {
    bags_.reserve(dialogue.turns.size());
    lengths_.reserve(dialogue.turns.size());
    std::vector<std::string> tokens;
    for (const Turn& turn : dialogue.turns) {
      tokens.clear();
      tokenize_into(turn.text, tokens);
      bags_.push_back(to_bag(tokens));
      lengths_.push_back(tokens.size());
    }
  }

  // Dense counts over the vocabulary for `text`; tokens unseen in the
  // dialogue are tallied in `unmatched` only.
  std::vector<std::size_t> dense_counts(std::string_view text,
                                        std::size_t& total) const {
    std::vector<std::string> tokens;
    tokenize_into(text, tokens);
    total = tokens.size();
    std::vector<std::size_t> counts(vocab_.size(), 0);
    for (const auto& t : tokens) {
      if (auto it = vocab_.find(t); it != vocab_.end()) ++counts[it->second];
    }
    return counts;
  }

  const Bag& bag(std::size_t turn) const { return bags_[turn]; }
  std::size_t length(std::size_t turn) const { return lengths_[turn]; }
  std::size_t turn_count() const { return bags_.size(); }
  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  Bag to_bag(const std::vector<std::string>& tokens) {
    Bag bag;
    for (const auto& t : tokens) {
      auto [it, inserted] = vocab_.try_emplace(t, vocab_.size());
      const std::size_t id = it->second;
      auto pos = std::find_if(bag.begin(), bag.end(),
                              [id](const auto& e) { return e.first == id; });
      if (pos == bag.end()) {
        bag.emplace_back(id, 1);
      } else {
        ++pos->second;
      }
    }
    return bag;
  }

  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<Bag> bags_;
  std::vector<std::size_t> lengths_;
};

inline void check_m(const Dialogue& dialogue, std::size_t m) {
  if (m < 1 || dialogue.turns.size() < 2 || m > dialogue.turns.size() - 1) {
    throw RangeError("dialogue '" + dialogue.id + "': m = " +
                     std::to_string(m) + " out of range for " +
                     std::to_string(dialogue.turns.size()) + " turns");
  }
}

}  // namespace detail

inline PrincipalSelection select_principal_gsg_plus(
    const Dialogue& dialogue, const GeneratedSummary& summary, std::size_t m) {
  detail::check_m(dialogue, m);
  if (summary.dialogue_id != dialogue.id) {
    throw RangeError("summary id '" + summary.dialogue_id +
                     "' does not match dialogue '" + dialogue.id + "'");
  }

  const detail::TurnBags bags(dialogue);
  std::size_t summary_total = 0;
  const std::vector<std::size_t> summary_counts =
      bags.dense_counts(summary.text, summary_total);

  std::vector<std::size_t> chosen_counts(bags.vocab_size(), 0);
  std::vector<char> chosen(bags.turn_count(), 0);
  std::size_t chosen_overlap = 0, chosen_length = 0;

  PrincipalSelection selection;
  selection.m = m;
  selection.trace.reserve(m);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t best = bags.turn_count();
    double best_f1 = -1.0;
    std::size_t best_overlap = 0;
    for (std::size_t i = 0; i < bags.turn_count(); ++i) {
      if (chosen[i]) continue;
      std::size_t overlap = chosen_overlap;
      for (const auto& [id, count] : bags.bag(i)) {
        const std::size_t have = chosen_counts[id];
        const std::size_t cap = summary_counts[id];
        overlap += std::min(have + count, cap) - std::min(have, cap);
      }
      const double f1 =
          score_from_counts(overlap, chosen_length + bags.length(i),
                            summary_total)
              .f1;
      if (f1 > best_f1) {
        best = i;
        best_f1 = f1;
        best_overlap = overlap;
      }
    }
    chosen[best] = 1;
    chosen_overlap = best_overlap;
    chosen_length += bags.length(best);
    for (const auto& [id, count] : bags.bag(best)) chosen_counts[id] += count;
    selection.trace.push_back({best, best_f1});
  }

  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (chosen[i]) selection.indices.push_back(i);
  }
  return selection;
}

inline PrincipalSelection select_principal_gsg_star(const Dialogue& dialogue,
                                                    std::size_t m) {
  detail::check_m(dialogue, m);

  const detail::TurnBags bags(dialogue);
  std::vector<std::size_t> totals(bags.vocab_size(), 0);
  std::size_t total_length = 0;
  for (std::size_t i = 0; i < bags.turn_count(); ++i) {
    for (const auto& [id, count] : bags.bag(i)) totals[id] += count;
    total_length += bags.length(i);
  }

  std::vector<double> scores(bags.turn_count());
  for (std::size_t i = 0; i < bags.turn_count(); ++i) {
    std::size_t overlap = 0;
    for (const auto& [id, count] : bags.bag(i)) {
      overlap += std::min(count, totals[id] - count);
    }
    scores[i] = score_from_counts(overlap, bags.length(i),
                                  total_length - bags.length(i))
                    .f1;
  }

  std::vector<std::size_t> order(bags.turn_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });

  PrincipalSelection selection;
  selection.m = m;
  for (std::size_t k = 0; k < m; ++k) {
    selection.trace.push_back({order[k], scores[order[k]]});
    selection.indices.push_back(order[k]);
  }
  std::sort(selection.indices.begin(), selection.indices.end());
  return selection;
}

// DIALOGUE: ascending turn index. SCORE: descending trace score, pick order
// on ties.
inline std::string render_principal(const Dialogue& dialogue,
                                    const PrincipalSelection& selection,
                                    PrincipalOrder order,
                                    bool with_speaker = true) {
  std::vector<std::size_t> picked;
  if (order == PrincipalOrder::kDialogue) {
    picked = selection.indices;
  } else {
    std::vector<SelectionStep> steps = selection.trace;
    std::stable_sort(steps.begin(), steps.end(),
                     [](const SelectionStep& a, const SelectionStep& b) {
                       return a.f1 > b.f1;
                     });
    for (const auto& s : steps) picked.push_back(s.index);
  }
  std::vector<Turn> turns;
  turns.reserve(picked.size());
  for (const std::size_t i : picked) turns.push_back(dialogue.turns.at(i));
  return join_turns(turns, with_speaker);
}

}  // namespace dialsum
