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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialsum/core.hpp"
#include "dialsum/principal.hpp"
#include "dialsum/text_metrics.hpp"

namespace dialsum {

// First line of every model input.
inline constexpr std::string_view kSummaryPrefix = "[Summary]";

// Chooses G only when it beats the principal strictly; ties go to P.
inline Source better_rouge(std::string_view g_text, std::string_view p_text,
                           std::string_view remainder_text) {
  const TokenSequence remainder = tokenize(remainder_text);
  const double s_g = rouge_1(tokenize(g_text), remainder).f1;
  const double s_p = rouge_1(tokenize(p_text), remainder).f1;
  return s_g > s_p ? Source::kG : Source::kP;
}

// One Bernoulli(copy_probability) draw per selected turn, ascending index
// order. Returns the indices kept in the input.
inline std::vector<std::size_t> apply_copy_mechanism(
    const PrincipalSelection& selection, double copy_probability,
    RandomStream& rng) {
  std::vector<std::size_t> retained;
  for (const std::size_t index : selection.indices) {
    if (rng.bernoulli(copy_probability)) retained.push_back(index);
  }
  return retained;
}

inline PrincipalSelection select_principal(const Dialogue& dialogue,
                                           const GeneratedSummary* summary,
                                           const StrategyConfig& config) {
  const std::size_t m =
      compute_m(dialogue.turns.size(), config.compression_ratio);
  if (config.selector == Selector::kGsgStar) {
    return select_principal_gsg_star(dialogue, m);
  }
  return select_principal_gsg_plus(dialogue, *summary, m);
}

// Assembles one pre-training example. `summary` may be null only when the
// config does not require one. Truncation happens later, in the pipeline.
inline TrainingExample build_example(const Dialogue& dialogue,
                                     const GeneratedSummary* summary,
                                     const StrategyConfig& config) {
  if (dialogue.turns.size() < 2) {
    throw RangeError("dialogue '" + dialogue.id +
                     "' has fewer than 2 turns");
  }
  if (summary == nullptr && config.requires_summary()) {
    throw RangeError("dialogue '" + dialogue.id +
                     "' has no helper summary");
  }
  if (summary != nullptr && summary->dialogue_id != dialogue.id) {
    throw RangeError("summary id '" + summary->dialogue_id +
                     "' does not match dialogue '" + dialogue.id + "'");
  }

  TrainingExample example;
  example.dialogue_id = dialogue.id;

  auto full_input = [&] {
    std::string input(kSummaryPrefix);
    input.push_back('\n');
    input += join_turns(dialogue.turns, true);
    return input;
  };

  if (config.strategy == Strategy::kAllG) {
    example.source = Source::kG;
    example.input_text = full_input();
    example.target_text = summary->text;
    return example;
  }

  const PrincipalSelection selection =
      select_principal(dialogue, summary, config);

  std::vector<char> in_principal(dialogue.turns.size(), 0);
  for (const std::size_t i : selection.indices) in_principal[i] = 1;

  Source source = Source::kP;
  if (config.strategy == Strategy::kBetterRouge) {
    std::vector<Turn> remainder;
    for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
      if (!in_principal[i]) remainder.push_back(dialogue.turns[i]);
    }
    const std::string p_text = render_principal(
        dialogue, selection, PrincipalOrder::kDialogue, false);
    source = better_rouge(summary->text, p_text, join_turns(remainder, false));
  }

  if (source == Source::kG) {
    example.source = Source::kG;
    example.input_text = full_input();
    example.target_text = summary->text;
    return example;
  }

  RandomStream rng = derive_example_rng(config.global_seed, dialogue.id);
  example.copied_turn_indices =
      apply_copy_mechanism(selection, config.copy_probability, rng);
  for (const std::size_t i : example.copied_turn_indices) in_principal[i] = 0;

  std::vector<Turn> kept;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    if (!in_principal[i]) kept.push_back(dialogue.turns[i]);
  }
  example.source = Source::kP;
  example.input_text = std::string(kSummaryPrefix) + "\n" +
                       join_turns(kept, true);
  example.target_text =
      render_principal(dialogue, selection, config.principal_order, true);
  return example;
}

inline TrainingExample build_example(
    const Dialogue& dialogue, const std::optional<GeneratedSummary>& summary,
    const StrategyConfig& config) {
  return build_example(dialogue, summary ? &*summary : nullptr, config);
}

}  // namespace dialsum
