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

// Corpus-scale example construction.
//
// The reader pulls a bounded batch of dialogue lines, the worker pool parses,
// cleans and builds each one independently, and the writer emits results in
// input order. Output bytes depend only on the inputs and the config, never
// on the worker count.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dialsum/cleaning.hpp"
#include "dialsum/core.hpp"
#include "dialsum/objective.hpp"
#include "dialsum/parallel.hpp"
#include "dialsum/records.hpp"

namespace dialsum {

struct SourceCounts {
  std::size_t g = 0;
  std::size_t p = 0;

  friend bool operator==(const SourceCounts&, const SourceCounts&) = default;
};

struct PipelineStats {
  std::size_t dialogues_in = 0;
  std::size_t dropped_short = 0;
  std::size_t dropped_missing_summary = 0;
  std::size_t examples_out = 0;
  SourceCounts source_counts;
  std::size_t copied_turn_total = 0;
  double mean_turns = 0.0;
  double mean_m = 0.0;
  // Examples whose input still exceeds max_tokens because a single turn
  // alone is over budget.
  std::size_t oversized_floor = 0;

  double p_fraction() const noexcept {
    const std::size_t total = source_counts.g + source_counts.p;
    return total == 0 ? 0.0
                      : static_cast<double>(source_counts.p) /
                            static_cast<double>(total);
  }

  friend bool operator==(const PipelineStats&, const PipelineStats&) = default;
};

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

inline std::size_t count_whitespace_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (const char c : text) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r' ||
                       c == '\f' || c == '\v';
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

// Drops whole turns (lines) from the end of the input until its whitespace
// token count fits max_tokens. The prefix line and the first turn are never
// dropped.
inline TrainingExample truncate_example(TrainingExample example,
                                        std::size_t max_tokens) {
  if (max_tokens < 1) throw RangeError("max_tokens must be positive");
  std::size_t total = count_whitespace_tokens(example.input_text);
  if (total <= max_tokens) return example;

  std::string& input = example.input_text;
  std::size_t lines = 1 + static_cast<std::size_t>(
                              std::count(input.begin(), input.end(), '\n'));
  while (total > max_tokens && lines > 2) {
    const std::size_t cut = input.rfind('\n');
    total -= count_whitespace_tokens(std::string_view(input).substr(cut + 1));
    input.resize(cut);
    --lines;
  }
  return example;
}

// ---------------------------------------------------------------------------
// Summary join
// ---------------------------------------------------------------------------

class SummaryIndex {
 public:
  // Throws DuplicateIdError on a repeated id.
  void add(GeneratedSummary summary, const std::string& source = "summaries") {
    std::string id = summary.dialogue_id;
    auto [it, inserted] = by_id_.try_emplace(std::move(id), std::move(summary));
    if (!inserted) throw DuplicateIdError(source, it->first);
  }

  const GeneratedSummary* find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return by_id_.size(); }

 private:
  std::unordered_map<std::string, GeneratedSummary> by_id_;
};

inline SummaryIndex load_summaries(std::istream& in,
                                   const std::string& source = "summaries") {
  SummaryIndex index;
  LineReader reader(in, source);
  while (auto line = reader.next()) {
    index.add(parse_record_line(*line, source, reader.line(),
                                summary_from_json),
              source);
  }
  return index;
}

// Left join on dialogue id. Duplicate ids on either side throw.
inline std::vector<std::pair<Dialogue, std::optional<GeneratedSummary>>>
join_summaries(std::vector<Dialogue> dialogues,
               std::vector<GeneratedSummary> summaries) {
  SummaryIndex index;
  for (auto& s : summaries) index.add(std::move(s));
  std::unordered_set<std::string> seen;
  std::vector<std::pair<Dialogue, std::optional<GeneratedSummary>>> joined;
  joined.reserve(dialogues.size());
  for (auto& d : dialogues) {
    if (!seen.insert(d.id).second) throw DuplicateIdError("dialogues", d.id);
    std::optional<GeneratedSummary> s;
    if (const auto* found = index.find(d.id)) s = *found;
    joined.emplace_back(std::move(d), std::move(s));
  }
  return joined;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct StreamOptions {
  std::size_t workers = 1;
  // Records per worker per batch; bounds memory held in flight.
  std::size_t batch_per_worker = 256;
  std::string dialogue_source = "dialogues";
  std::ostream* log = &std::cerr;
  // Per-dialogue warnings beyond this many are only counted.
  std::size_t max_warnings = 10;
};

namespace detail {

enum class Outcome : std::uint8_t { kEmitted, kShort, kMissingSummary };

struct Slot {
  std::string raw;
  std::size_t line = 0;
  std::string id;
  Outcome outcome = Outcome::kEmitted;
  std::string output;
  std::size_t turns = 0;
  std::size_t m = 0;
  Source source = Source::kG;
  std::size_t copied = 0;
  bool oversized = false;
  std::exception_ptr error;
};

inline void process_slot(Slot& slot, const StrategyConfig& config,
                         const SummaryIndex* summaries,
                         const std::string& source) {
  try {
    const Dialogue raw = parse_record_line(slot.raw, source, slot.line,
                                           dialogue_from_json);
    slot.id = raw.id;
    std::optional<Dialogue> dialogue = clean_dialogue(raw);
    if (!dialogue) {
      slot.outcome = Outcome::kShort;
      return;
    }
    const GeneratedSummary* summary =
        summaries ? summaries->find(dialogue->id) : nullptr;
    if (summary == nullptr && config.requires_summary()) {
      slot.outcome = Outcome::kMissingSummary;
      return;
    }
    TrainingExample example = truncate_example(
        build_example(*dialogue, summary, config), config.max_tokens);
    slot.oversized =
        count_whitespace_tokens(example.input_text) > config.max_tokens;
    slot.turns = dialogue->turns.size();
    slot.m = compute_m(slot.turns, config.compression_ratio);
    slot.source = example.source;
    slot.copied = example.copied_turn_indices.size();
    slot.output = to_json_line(example);
  } catch (...) {
    slot.error = std::current_exception();
  }
}

}  // namespace detail

// Streams dialogues from `dialogues` to `out`. `summaries` may be null when
// the config does not need helper summaries.
inline PipelineStats run_pipeline(const StrategyConfig& config,
                                  std::istream& dialogues,
                                  const SummaryIndex* summaries,
                                  std::ostream& out,
                                  const StreamOptions& options = {}) {
  config.validate();
  if (summaries == nullptr && config.requires_summary()) {
    throw ConfigError("summaries",
                      "required by strategy '" +
                          std::string(to_string(config.strategy)) +
                          "' with selector '" +
                          std::string(to_string(config.selector)) + "'");
  }

  WorkerPool pool(options.workers);
  const std::size_t batch_size =
      pool.size() * std::max<std::size_t>(options.batch_per_worker, 1);
  LineReader reader(dialogues, options.dialogue_source);
  std::unordered_set<std::string> seen_ids;
  std::vector<detail::Slot> batch;
  batch.reserve(batch_size);

  PipelineStats stats;
  std::size_t turn_sum = 0, m_sum = 0, warnings = 0;

  auto warn = [&](const std::string& message) {
    if (options.log && warnings < options.max_warnings) {
      *options.log << "warning: " << message << '\n';
    }
    ++warnings;
  };

  for (bool more = true; more;) {
    batch.clear();
    while (batch.size() < batch_size) {
      auto line = reader.next();
      if (!line) {
        more = false;
        break;
      }
      detail::Slot slot;
      slot.raw.assign(line->data(), line->size());
      slot.line = reader.line();
      batch.push_back(std::move(slot));
    }

    pool.parallel_for(batch.size(), [&](std::size_t i) {
      detail::process_slot(batch[i], config, summaries,
                           options.dialogue_source);
    });

    for (detail::Slot& slot : batch) {
      if (slot.error) std::rethrow_exception(slot.error);
      if (!seen_ids.insert(slot.id).second) {
        throw DuplicateIdError(options.dialogue_source, slot.id);
      }
      ++stats.dialogues_in;
      switch (slot.outcome) {
        case detail::Outcome::kShort:
          ++stats.dropped_short;
          break;
        case detail::Outcome::kMissingSummary:
          ++stats.dropped_missing_summary;
          warn("no helper summary for dialogue '" + slot.id + "', skipped");
          break;
        case detail::Outcome::kEmitted:
          out.write(slot.output.data(),
                    static_cast<std::streamsize>(slot.output.size()));
          ++stats.examples_out;
          (slot.source == Source::kG ? stats.source_counts.g
                                     : stats.source_counts.p)++;
          stats.copied_turn_total += slot.copied;
          if (slot.oversized) ++stats.oversized_floor;
          turn_sum += slot.turns;
          m_sum += slot.m;
          break;
      }
    }
    if (!out) throw Error("write failed");
  }

  if (warnings > options.max_warnings && options.log) {
    *options.log << "warning: " << warnings - options.max_warnings
                 << " further warnings suppressed\n";
  }
  if (stats.examples_out > 0) {
    const auto n = static_cast<double>(stats.examples_out);
    stats.mean_turns = static_cast<double>(turn_sum) / n;
    stats.mean_m = static_cast<double>(m_sum) / n;
  }
  return stats;
}

struct PipelineFiles {
  std::filesystem::path dialogues;
  std::optional<std::filesystem::path> summaries;
  std::filesystem::path output;
};

// File-level driver. Output goes to a sibling temporary that is renamed into
// place on success and removed on any failure.
inline PipelineStats run_pipeline(const StrategyConfig& config,
                                  const PipelineFiles& files,
                                  StreamOptions options = {}) {
  config.validate();
  std::optional<SummaryIndex> summaries;
  if (files.summaries) {
    std::ifstream in(*files.summaries, std::ios::binary);
    if (!in) throw Error("cannot open " + files.summaries->string());
    summaries = load_summaries(in, files.summaries->string());
  }

  std::ifstream in(files.dialogues, std::ios::binary);
  if (!in) throw Error("cannot open " + files.dialogues.string());
  options.dialogue_source = files.dialogues.string();

  std::filesystem::path partial = files.output;
  partial += ".partial";
  try {
    PipelineStats stats;
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open " + partial.string());
      stats = run_pipeline(config, in, summaries ? &*summaries : nullptr, out,
                           options);
      out.flush();
      if (!out) throw Error("write failed: " + partial.string());
    }
    std::filesystem::rename(partial, files.output);
    return stats;
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(partial, ignored);
    throw;
  }
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

inline OrderedJson to_json(const PipelineStats& s) {
  OrderedJson j = OrderedJson::object();
  j["dialogues_in"] = s.dialogues_in;
  j["dropped_short"] = s.dropped_short;
  j["dropped_missing_summary"] = s.dropped_missing_summary;
  j["examples_out"] = s.examples_out;
  j["source_counts"] = {{"G", s.source_counts.g}, {"P", s.source_counts.p}};
  j["copied_turn_total"] = s.copied_turn_total;
  j["mean_turns"] = s.mean_turns;
  j["mean_m"] = s.mean_m;
  j["oversized_floor"] = s.oversized_floor;
  j["p_fraction"] = s.p_fraction();
  if (s.examples_out == 0) {
    j["warnings"] = OrderedJson::array({"zero examples produced"});
  }
  return j;
}

inline PipelineStats stats_from_json(const Json& j) {
  PipelineStats s;
  s.dialogues_in = j.at("dialogues_in").get<std::size_t>();
  s.dropped_short = j.at("dropped_short").get<std::size_t>();
  s.dropped_missing_summary =
      j.at("dropped_missing_summary").get<std::size_t>();
  s.examples_out = j.at("examples_out").get<std::size_t>();
  s.source_counts.g = j.at("source_counts").at("G").get<std::size_t>();
  s.source_counts.p = j.at("source_counts").at("P").get<std::size_t>();
  s.copied_turn_total = j.at("copied_turn_total").get<std::size_t>();
  s.mean_turns = j.at("mean_turns").get<double>();
  s.mean_m = j.at("mean_m").get<double>();
  s.oversized_floor = j.value("oversized_floor", std::size_t{0});
  return s;
}

enum class ReportFormat { kText, kJson };

inline std::string compute_stats_report(const PipelineStats& s,
                                        ReportFormat format) {
  if (format == ReportFormat::kJson) return to_json(s).dump() + "\n";
  std::ostringstream os;
  os << std::left;
  auto row = [&](std::string_view name, const auto& value) {
    os << std::setw(26) << name << value << '\n';
  };
  row("dialogues_in", s.dialogues_in);
  row("dropped_short", s.dropped_short);
  row("dropped_missing_summary", s.dropped_missing_summary);
  row("examples_out", s.examples_out);
  row("source G", s.source_counts.g);
  row("source P", s.source_counts.p);
  row("copied_turn_total", s.copied_turn_total);
  os << std::fixed << std::setprecision(4);
  row("mean_turns", s.mean_turns);
  row("mean_m", s.mean_m);
  row("p_fraction", s.p_fraction());
  row("oversized_floor", s.oversized_floor);
  if (s.examples_out == 0) os << "warning: zero examples produced\n";
  return os.str();
}

}  // namespace dialsum
