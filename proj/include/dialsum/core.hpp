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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dialsum {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid StrategyConfig or flag value. field() names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed record in an input file.
class InputError : public Error {
 public:
  InputError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class DuplicateIdError : public Error {
 public:
  DuplicateIdError(std::string source, std::string id)
      : Error(source + ": duplicate id '" + id + "'"), id_(std::move(id)) {}

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

// Precondition violation on an algorithmic call (m out of range, id mismatch).
class RangeError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Turn {
  std::optional<std::string> speaker;
  std::string text;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

struct GeneratedSummary {
  std::string dialogue_id;
  std::string text;

  friend bool operator==(const GeneratedSummary&,
                         const GeneratedSummary&) = default;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

// F1 as the harmonic mean of precision and recall; 0 when both are 0.
inline double harmonic_f1(double precision, double recall) noexcept {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

// One greedy step: the turn picked and the score that won the step.
struct SelectionStep {
  std::size_t index = 0;
  double f1 = 0.0;

  friend bool operator==(const SelectionStep&, const SelectionStep&) = default;
};

// The "principal" pseudo summary: selected turn indices (ascending), plus the
// pick order with scores.
struct PrincipalSelection {
  std::vector<std::size_t> indices;
  std::size_t m = 0;
  std::vector<SelectionStep> trace;

  friend bool operator==(const PrincipalSelection&,
                         const PrincipalSelection&) = default;
};

enum class Strategy { kAllG, kAllP, kBetterRouge };
enum class Selector { kGsgPlus, kGsgStar };
enum class PrincipalOrder { kDialogue, kScore };
enum class Source { kG, kP };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Selector s) noexcept;
std::string_view to_string(PrincipalOrder o) noexcept;
std::string_view to_string(Source s) noexcept;

Strategy parse_strategy(std::string_view text);
Selector parse_selector(std::string_view text);
PrincipalOrder parse_principal_order(std::string_view text);
Source parse_source(std::string_view text);

struct StrategyConfig {
  Strategy strategy = Strategy::kBetterRouge;
  double compression_ratio = 0.15;
  double copy_probability = 0.15;
  Selector selector = Selector::kGsgPlus;
  PrincipalOrder principal_order = PrincipalOrder::kDialogue;
  std::size_t max_tokens = 512;
  std::uint64_t global_seed = 0;

  // Throws ConfigError naming the first field out of range.
  void validate() const;

  // True unless the configuration can run without a helper summary
  // (ALL_P targets with the summary-free GSG* selector).
  bool requires_summary() const noexcept {
    return !(strategy == Strategy::kAllP && selector == Selector::kGsgStar);
  }

  friend bool operator==(const StrategyConfig&,
                         const StrategyConfig&) = default;
};

struct TrainingExample {
  std::string dialogue_id;
  std::string input_text;
  std::string target_text;
  Source source = Source::kG;
  std::vector<std::size_t> copied_turn_indices;

  friend bool operator==(const TrainingExample&,
                         const TrainingExample&) = default;
};

// ---------------------------------------------------------------------------
// Deterministic per-example randomness
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// splitmix64 stream. Single owner; never share one across threads.
class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t state) noexcept
      : state_(state) {}

  constexpr std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // u = next_u64 / 2^64, in [0, 1).
  double next_uniform() noexcept {
    return static_cast<double>(next_u64()) * 0x1.0p-64;
  }

  // Fires iff u < probability.
  bool bernoulli(double probability) noexcept {
    return next_uniform() < probability;
  }

 private:
  std::uint64_t state_;
};

inline constexpr RandomStream derive_example_rng(
    std::uint64_t global_seed, std::string_view dialogue_id) noexcept {
  return RandomStream(fnv1a64(dialogue_id) ^ global_seed);
}

// ---------------------------------------------------------------------------
// Inline definitions
// ---------------------------------------------------------------------------

inline std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kAllG: return "all-g";
    case Strategy::kAllP: return "all-p";
    case Strategy::kBetterRouge: return "better-rouge";
  }
  return "?";
}

inline std::string_view to_string(Selector s) noexcept {
  return s == Selector::kGsgPlus ? "gsg-plus" : "gsg-star";
}

inline std::string_view to_string(PrincipalOrder o) noexcept {
  return o == PrincipalOrder::kDialogue ? "dialogue" : "score";
}

inline std::string_view to_string(Source s) noexcept {
  return s == Source::kG ? "G" : "P";
}

inline Strategy parse_strategy(std::string_view text) {
  if (text == "all-g") return Strategy::kAllG;
  if (text == "all-p") return Strategy::kAllP;
  if (text == "better-rouge") return Strategy::kBetterRouge;
  throw ConfigError("strategy", "unknown value '" + std::string(text) + "'");
}

inline Selector parse_selector(std::string_view text) {
  if (text == "gsg-plus") return Selector::kGsgPlus;
  if (text == "gsg-star") return Selector::kGsgStar;
  throw ConfigError("selector", "unknown value '" + std::string(text) + "'");
}

inline PrincipalOrder parse_principal_order(std::string_view text) {
  if (text == "dialogue") return PrincipalOrder::kDialogue;
  if (text == "score") return PrincipalOrder::kScore;
  throw ConfigError("order", "unknown value '" + std::string(text) + "'");
}

inline Source parse_source(std::string_view text) {
  if (text == "G") return Source::kG;
  if (text == "P") return Source::kP;
  throw Error("unknown source '" + std::string(text) + "'");
}

inline void StrategyConfig::validate() const {
  // Negated comparisons so NaN is rejected as well.
  if (!(compression_ratio > 0.0 && compression_ratio < 1.0)) {
    throw ConfigError("compression_ratio",
                      "must lie in (0, 1), got " +
                          std::to_string(compression_ratio));
  }
  if (!(copy_probability >= 0.0 && copy_probability <= 1.0)) {
    throw ConfigError("copy_probability",
                      "must lie in [0, 1], got " +
                          std::to_string(copy_probability));
  }
  if (max_tokens < 1) {
    throw ConfigError("max_tokens", "must be a positive integer");
  }
}

}  // namespace dialsum
