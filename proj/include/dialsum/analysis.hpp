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

// Test-set contamination check (ROUGE-2 recall of each target against its
// closest pre-training document) and reference-based ROUGE evaluation.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dialsum/core.hpp"
#include "dialsum/parallel.hpp"
#include "dialsum/records.hpp"
#include "dialsum/text_metrics.hpp"

namespace dialsum {

struct OverlapReport {
  std::vector<double> thresholds;  // descending
  std::vector<std::size_t> counts;
  std::vector<double> percentages;  // counts / #targets, in [0, 1]
  double sample_fraction = 1.0;
  std::size_t targets = 0;
  std::size_t documents_used = 0;
  std::vector<double> max_recalls;  // per target, input order
};

// Documents kept by the seeded subsample: document i survives iff the first
// draw of derive_example_rng(seed, to_string(i)) is below sample_fraction.
inline std::vector<std::size_t> sample_documents(std::size_t count,
                                                 double sample_fraction,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream rng = derive_example_rng(seed, std::to_string(i));
    if (rng.bernoulli(sample_fraction)) kept.push_back(i);
  }
  return kept;
}

inline OverlapReport overlap_report(const std::vector<std::string>& targets,
                                    const std::vector<std::string>& documents,
                                    std::vector<double> thresholds,
                                    double sample_fraction,
                                    std::uint64_t seed,
                                    std::size_t workers = 1) {
  if (targets.empty()) throw Error("overlap: no targets");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw ConfigError("sample", "must lie in (0, 1]");
  }
  for (const double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ConfigError("thresholds", "each threshold must lie in [0, 1]");
    }
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());

  const std::vector<std::size_t> kept =
      sample_documents(documents.size(), sample_fraction, seed);
  if (kept.empty()) throw Error("overlap: no documents after sampling");

  // Bigram multisets, keyed by token pair text.
  using Bigrams = std::unordered_map<std::string, std::size_t>;
  auto bigrams_of = [](const std::string& text, std::size_t& total) {
    const TokenSequence seq = tokenize(text);
    Bigrams grams;
    total = seq.size() < 2 ? 0 : seq.size() - 1;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      ++grams[seq[i] + ' ' + seq[i + 1]];
    }
    return grams;
  };

  std::vector<Bigrams> doc_grams(kept.size());
  WorkerPool pool(workers);
  pool.parallel_for(kept.size(), [&](std::size_t k) {
    std::size_t unused = 0;
    doc_grams[k] = bigrams_of(documents[kept[k]], unused);
  });

  OverlapReport report;
  report.thresholds = thresholds;
  report.sample_fraction = sample_fraction;
  report.targets = targets.size();
  report.documents_used = kept.size();
  report.max_recalls.assign(targets.size(), 0.0);

  pool.parallel_for(targets.size(), [&](std::size_t t) {
    std::size_t total = 0;
    const Bigrams target = bigrams_of(targets[t], total);
    if (total == 0) return;
    std::size_t best = 0;
    for (const Bigrams& doc : doc_grams) {
      std::size_t overlap = 0;
      for (const auto& [gram, count] : target) {
        if (auto it = doc.find(gram); it != doc.end()) {
          overlap += std::min(count, it->second);
        }
      }
      best = std::max(best, overlap);
      if (best == total) break;
    }
    report.max_recalls[t] =
        score_from_counts(best, total, total).recall;
  });

  for (const double threshold : report.thresholds) {
    const auto n = static_cast<std::size_t>(
        std::count_if(report.max_recalls.begin(), report.max_recalls.end(),
                      [&](double r) { return r >= threshold; }));
    report.counts.push_back(n);
    report.percentages.push_back(static_cast<double>(n) /
                                 static_cast<double>(targets.size()));
  }
  return report;
}

inline OrderedJson to_json(const OverlapReport& r) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
    rows.push_back({{"threshold", r.thresholds[i]},
                    {"count", r.counts[i]},
                    {"percentage", r.percentages[i]}});
  }
  OrderedJson j = OrderedJson::object();
  j["targets"] = r.targets;
  j["documents_used"] = r.documents_used;
  j["sample_fraction"] = r.sample_fraction;
  j["rows"] = std::move(rows);
  return j;
}

inline std::string overlap_table(const OverlapReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "threshold" << std::setw(10) << "count"
     << "percent\n";
  os << std::fixed;
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
    os << ">= " << std::setw(9) << std::setprecision(2) << r.thresholds[i]
       << std::setw(10) << r.counts[i] << std::setprecision(2)
       << 100.0 * r.percentages[i] << "%\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Reference-based evaluation
// ---------------------------------------------------------------------------

struct SummaryScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rouge_l = 0.0;
  double rouge_lsum = 0.0;

  friend bool operator==(const SummaryScores&, const SummaryScores&) = default;
};

struct Evaluation {
  std::vector<std::pair<std::string, SummaryScores>> per_id;  // reference order
  SummaryScores mean;
};

class IdMismatchError : public Error {
 public:
  IdMismatchError(std::vector<std::string> missing_candidates,
                  std::vector<std::string> missing_references)
      : Error(describe(missing_candidates, missing_references)),
        missing_candidates_(std::move(missing_candidates)),
        missing_references_(std::move(missing_references)) {}

  const std::vector<std::string>& missing_candidates() const noexcept {
    return missing_candidates_;
  }
  const std::vector<std::string>& missing_references() const noexcept {
    return missing_references_;
  }

 private:
  static std::string describe(const std::vector<std::string>& cands,
                              const std::vector<std::string>& refs) {
    std::string msg = "id mismatch;";
    auto list = [&](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string(" ") + what + ":";
      for (const auto& id : ids) msg += " " + id;
      msg += ";";
    };
    list("no candidate for", cands);
    list("no reference for", refs);
    return msg;
  }

  std::vector<std::string> missing_candidates_;
  std::vector<std::string> missing_references_;
};

inline SummaryScores score_summary(const std::string& candidate,
                                   const std::string& reference) {
  const TokenSequence cand = tokenize(candidate);
  const TokenSequence ref = tokenize(reference);
  return {rouge_n(cand, ref, 1).f1, rouge_n(cand, ref, 2).f1,
          rouge_l(cand, ref).f1, rouge_l_sum(candidate, reference).f1};
}

using IdText = std::pair<std::string, std::string>;

inline Evaluation evaluate_summaries(const std::vector<IdText>& candidates,
                                     const std::vector<IdText>& references) {
  std::unordered_map<std::string, const std::string*> by_id;
  for (const auto& [id, text] : candidates) {
    if (!by_id.emplace(id, &text).second) {
      throw DuplicateIdError("candidates", id);
    }
  }
  std::vector<std::string> no_candidate, no_reference;
  std::unordered_set<std::string> ref_ids;
  for (const auto& [id, text] : references) {
    if (!ref_ids.insert(id).second) throw DuplicateIdError("references", id);
    if (!by_id.count(id)) no_candidate.push_back(id);
  }
  for (const auto& [id, text] : candidates) {
    if (!ref_ids.count(id)) no_reference.push_back(id);
  }
  if (!no_candidate.empty() || !no_reference.empty()) {
    throw IdMismatchError(std::move(no_candidate), std::move(no_reference));
  }

  Evaluation eval;
  eval.per_id.reserve(references.size());
  for (const auto& [id, text] : references) {
    eval.per_id.emplace_back(id, score_summary(*by_id.at(id), text));
  }
  if (!eval.per_id.empty()) {
    const auto n = static_cast<double>(eval.per_id.size());
    for (const auto& [id, s] : eval.per_id) {
      eval.mean.rouge1 += s.rouge1;
      eval.mean.rouge2 += s.rouge2;
      eval.mean.rouge_l += s.rouge_l;
      eval.mean.rouge_lsum += s.rouge_lsum;
    }
    eval.mean.rouge1 /= n;
    eval.mean.rouge2 /= n;
    eval.mean.rouge_l /= n;
    eval.mean.rouge_lsum /= n;
  }
  return eval;
}

}  // namespace dialsum
