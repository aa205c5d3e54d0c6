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

// Builds one pre-training example from an in-memory dialogue and prints the
// principal selection and the resulting record.

#include <iostream>

#include "dialsum/dialsum.hpp"

int main() {
  using namespace dialsum;

  const Dialogue dialogue{
      "demo-1",
      {{"Amy", "Are we still on for the review tomorrow?"},
       {"Ben", "Yes, 10am in room 4, see https://example.com/agenda"},
       {"Amy", "Great, I'll bring the quarterly numbers 😀"},
       {"Ben", "Perfect. Also invite Carla from finance."},
       {"Amy", "Done. So: review tomorrow 10am room 4 with Carla and the "
               "quarterly numbers."},
       {"Ben", "See you then."}}};
  const GeneratedSummary summary{
      "demo-1",
      "Amy and Ben will hold the review tomorrow at 10am in room 4 with "
      "Carla; Amy brings the quarterly numbers."};

  const auto cleaned = clean_dialogue(dialogue);
  if (!cleaned) return 1;

  StrategyConfig config;
  config.compression_ratio = 0.3;
  config.global_seed = 42;

  const std::size_t m = compute_m(cleaned->turns.size(),
                                  config.compression_ratio);
  const PrincipalSelection selection =
      select_principal_gsg_plus(*cleaned, summary, m);
  std::cout << "m = " << m << ", principal turns:";
  for (const auto i : selection.indices) std::cout << ' ' << i;
  std::cout << "\n\n";

  const TrainingExample example = truncate_example(
      build_example(*cleaned, &summary, config), config.max_tokens);
  std::cout << to_json(example).dump(2) << '\n';
  return 0;
}
