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

// Shared test fixtures: scratch directories, synthetic corpora and the
// offline helper stand-in.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dialsum/dialsum.hpp"

namespace testing_support {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("dialsum-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Offline stand-in for the summary helper: the longest turn (by code points),
// earliest on ties.
inline dialsum::GeneratedSummary stub_summarize(
    const dialsum::Dialogue& dialogue) {
  auto code_points = [](const std::string& s) {
    std::size_t n = 0;
    for (const unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < dialogue.turns.size(); ++i) {
    if (code_points(dialogue.turns[i].text) >
        code_points(dialogue.turns[best].text)) {
      best = i;
    }
  }
  return {dialogue.id,
          dialogue.turns.empty() ? std::string() : dialogue.turns[best].text};
}

struct CorpusShape {
  std::size_t dialogues = 100;
  std::size_t mean_turns = 10;
  std::size_t tokens_per_turn = 12;
  std::size_t vocab = 400;
  std::uint64_t seed = 1;
};

// Random dialogues of lowercase ASCII words; turn counts uniform in
// [2, 2 * mean_turns - 2] so the mean is mean_turns.
inline std::vector<dialsum::Dialogue> synthetic_corpus(const CorpusShape& shape) {
  std::mt19937_64 rng(shape.seed);
  std::uniform_int_distribution<std::size_t> turns_dist(
      2, std::max<std::size_t>(2, 2 * shape.mean_turns - 2));
  std::uniform_int_distribution<std::size_t> word_dist(0, shape.vocab - 1);
  std::vector<dialsum::Dialogue> corpus;
  corpus.reserve(shape.dialogues);
  for (std::size_t d = 0; d < shape.dialogues; ++d) {
    dialsum::Dialogue dialogue;
    dialogue.id = "syn-" + std::to_string(d);
    const std::size_t turns = turns_dist(rng);
    for (std::size_t t = 0; t < turns; ++t) {
      std::string text;
      for (std::size_t k = 0; k < shape.tokens_per_turn; ++k) {
        if (k) text.push_back(' ');
        text += "w" + std::to_string(word_dist(rng));
      }
      dialogue.turns.push_back(
          {std::string(t % 2 ? "B" : "A"), std::move(text)});
    }
    corpus.push_back(std::move(dialogue));
  }
  return corpus;
}

template <typename Records>
std::string to_ndjson(const Records& records) {
  std::string out;
  for (const auto& r : records) out += dialsum::to_json_line(r);
  return out;
}

inline std::vector<dialsum::GeneratedSummary> stub_summaries(
    const std::vector<dialsum::Dialogue>& corpus) {
  std::vector<dialsum::GeneratedSummary> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus) out.push_back(stub_summarize(d));
  return out;
}

// Hash of file bytes for output comparisons.
inline std::uint64_t file_hash(const fs::path& path) {
  return dialsum::fnv1a64(read_file(path));
}

// Overlap fixture: target i is six unique tokens and its only matching
// document holds the first matched_bigrams[i] + 1 of them in order, so its
// maximum bigram recall is matched_bigrams[i] / 5.
struct PlantedOverlap {
  std::vector<std::string> targets;
  std::vector<std::string> documents;
};

inline PlantedOverlap planted_overlap(
    const std::vector<std::size_t>& matched_bigrams) {
  PlantedOverlap out;
  for (std::size_t i = 0; i < matched_bigrams.size(); ++i) {
    std::vector<std::string> words;
    for (std::size_t k = 0; k < 6; ++k) {
      words.push_back("t" + std::to_string(i) + "x" + std::to_string(k));
    }
    std::string target, doc = "filler" + std::to_string(i);
    for (std::size_t k = 0; k < 6; ++k) target += (k ? " " : "") + words[k];
    const std::size_t keep = matched_bigrams[i] == 0 ? 0 : matched_bigrams[i] + 1;
    for (std::size_t k = 0; k < keep; ++k) doc += " " + words[k];
    doc += " filler end";
    out.targets.push_back(target);
    out.documents.push_back(doc);
  }
  return out;
}

// Recalls 1.0 x5, 0.8 x4, 0.6 x3, 0.4 x4, 0.2 x4: counts at
// {1.0, 0.8, 0.6, 0.4} are {5, 9, 12, 16}.
inline std::vector<std::size_t> planted_twenty() {
  std::vector<std::size_t> m;
  for (auto [bigrams, times] : std::vector<std::pair<std::size_t, int>>{
           {5, 5}, {4, 4}, {3, 3}, {2, 4}, {1, 4}}) {
    for (int k = 0; k < times; ++k) m.push_back(bigrams);
  }
  return m;
}

template <typename Strings>
std::string id_text_ndjson(const Strings& texts, const std::string& field,
                           const std::string& prefix = "r") {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    dialsum::OrderedJson j = dialsum::OrderedJson::object();
    j["id"] = prefix + std::to_string(i);
    j[field] = texts[i];
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace testing_support
