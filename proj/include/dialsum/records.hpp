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

// Newline-delimited JSON record schemas.
//
//   dialogue:  {"id": str, "turns": [{"speaker": str?, "text": str}]}
//   summary:   {"id": str, "summary": str}
//   example:   {"id": str, "input": str, "target": str, "source": "G"|"P",
//               "copied": [int]}
//
// Writers emit compact JSON, keys in the order above, one record per line,
// LF only.

#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "dialsum/core.hpp"
#include "dialsum/text_metrics.hpp"

namespace dialsum {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline const Json& require_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(std::string("missing field '") + key + "'");
  }
  return *it;
}

inline std::string require_string(const Json& obj, const char* key) {
  const Json& v = require_field(obj, key);
  if (!v.is_string()) {
    throw Error(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline Json parse_object(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw Error("invalid JSON");
  if (!j.is_object()) throw Error("record must be a JSON object");
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dialogue
// ---------------------------------------------------------------------------

inline Dialogue dialogue_from_json(const Json& j) {
  Dialogue d;
  d.id = detail::require_string(j, "id");
  const Json& turns = detail::require_field(j, "turns");
  if (!turns.is_array()) throw Error("field 'turns' must be an array");
  d.turns.reserve(turns.size());
  for (const Json& t : turns) {
    if (!t.is_object()) throw Error("each turn must be an object");
    Turn turn;
    turn.text = detail::require_string(t, "text");
    if (auto it = t.find("speaker"); it != t.end() && !it->is_null()) {
      if (!it->is_string()) throw Error("field 'speaker' must be a string");
      turn.speaker = it->get<std::string>();
    }
    d.turns.push_back(std::move(turn));
  }
  return d;
}

inline OrderedJson to_json(const Dialogue& d) {
  OrderedJson turns = OrderedJson::array();
  for (const Turn& t : d.turns) {
    OrderedJson tj = OrderedJson::object();
    if (t.speaker) tj["speaker"] = *t.speaker;
    tj["text"] = t.text;
    turns.push_back(std::move(tj));
  }
  OrderedJson j = OrderedJson::object();
  j["id"] = d.id;
  j["turns"] = std::move(turns);
  return j;
}

// ---------------------------------------------------------------------------
// GeneratedSummary
// ---------------------------------------------------------------------------

inline GeneratedSummary summary_from_json(const Json& j) {
  return {detail::require_string(j, "id"),
          detail::require_string(j, "summary")};
}

inline OrderedJson to_json(const GeneratedSummary& s) {
  OrderedJson j = OrderedJson::object();
  j["id"] = s.dialogue_id;
  j["summary"] = s.text;
  return j;
}

// ---------------------------------------------------------------------------
// TrainingExample
// ---------------------------------------------------------------------------

inline TrainingExample example_from_json(const Json& j) {
  TrainingExample e;
  e.dialogue_id = detail::require_string(j, "id");
  e.input_text = detail::require_string(j, "input");
  e.target_text = detail::require_string(j, "target");
  e.source = parse_source(detail::require_string(j, "source"));
  const Json& copied = detail::require_field(j, "copied");
  if (!copied.is_array()) throw Error("field 'copied' must be an array");
  for (const Json& c : copied) {
    if (!c.is_number_unsigned()) {
      throw Error("field 'copied' must hold non-negative integers");
    }
    e.copied_turn_indices.push_back(c.get<std::size_t>());
  }
  return e;
}

inline OrderedJson to_json(const TrainingExample& e) {
  OrderedJson j = OrderedJson::object();
  j["id"] = e.dialogue_id;
  j["input"] = e.input_text;
  j["target"] = e.target_text;
  j["source"] = std::string(to_string(e.source));
  j["copied"] = e.copied_turn_indices;
  return j;
}

// ---------------------------------------------------------------------------
// Line helpers
// ---------------------------------------------------------------------------

// One compact JSON line, LF terminated.
template <typename Record>
std::string to_json_line(const Record& record) {
  std::string line = to_json(record).dump();
  line.push_back('\n');
  return line;
}

// Wraps per-record parse failures into InputError(source, line).
template <typename Parse>
auto parse_record_line(std::string_view text, const std::string& source,
                       std::size_t line, Parse&& parse) {
  try {
    return parse(detail::parse_object(text));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(source, line, e.what());
  }
}

// Reads NDJSON lines. Blank lines are skipped and a trailing CR is dropped;
// a non-empty final line without its LF is an error.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  // Next non-blank line, or nullopt at end of input.
  std::optional<std::string_view> next() {
    while (std::getline(in_, buffer_)) {
      ++line_;
      if (in_.eof() && !buffer_.empty()) {
        throw InputError(source_, line_, "missing final newline");
      }
      if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
      if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
      return std::string_view(buffer_);
    }
    if (in_.bad()) throw Error(source_ + ": read error");
    return std::nullopt;
  }

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string buffer_;
  std::size_t line_ = 0;
};

// Text carried by a generic record, for tools that accept any of the
// schemas above. With `field` empty the first present of summary, target,
// text, turns (joined, no speakers) or input is used.
inline std::string record_text(const Json& j, std::string_view field = {}) {
  auto extract = [&](const std::string& key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (key == "turns") return join_turns(dialogue_from_json(j).turns, false);
    throw Error("field '" + key + "' is not text");
  };
  if (!field.empty()) {
    if (auto v = extract(std::string(field))) return *v;
    throw Error("missing field '" + std::string(field) + "'");
  }
  for (const char* key : {"summary", "target", "text", "turns", "input"}) {
    if (auto v = extract(key)) return *v;
  }
  throw Error("record has no text field");
}

}  // namespace dialsum
