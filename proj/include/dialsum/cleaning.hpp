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

// Dialogue cleaning: URL and emoji removal, whitespace collapsing, short
// dialogue filtering.

#pragma once

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialsum/core.hpp"

namespace dialsum {

// Emoji blocks and joiners removed by cleaning.
inline constexpr bool is_stripped_emoji(char32_t c) noexcept {
  return (c >= 0x1F600 && c <= 0x1F64F) ||  // Emoticons
         (c >= 0x1F300 && c <= 0x1F5FF) ||  // Misc Symbols and Pictographs
         (c >= 0x1F680 && c <= 0x1F6FF) ||  // Transport and Map
         (c >= 0x1F900 && c <= 0x1F9FF) ||  // Supplemental Symbols
         (c >= 0x1FA70 && c <= 0x1FAFF) ||  // Symbols and Pictographs Ext-A
         (c >= 0x2600 && c <= 0x26FF) ||    // Misc Symbols
         (c >= 0x2700 && c <= 0x27BF) ||    // Dingbats
         c == 0xFE0F || c == 0x200D;
}

namespace detail {

inline bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

inline bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Offset where a URL begins inside a whitespace-free token, or npos. A URL
// starts with http://, https:// or www. at the token start or right after a
// non-alphanumeric byte ("(https://x" and "link:www.x" both qualify).
inline std::size_t url_start(std::string_view token) {
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (i > 0 && is_ascii_alnum(token[i - 1])) continue;
    const std::string_view rest = token.substr(i);
    if (starts_with_icase(rest, "http://") ||
        starts_with_icase(rest, "https://") ||
        starts_with_icase(rest, "www.")) {
      return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace detail

// Drops stripped-emoji code points and URL-bearing token tails, then joins
// the surviving whitespace-separated pieces with single spaces. Ill-formed
// UTF-8 sequences are replaced by U+FFFD.
inline std::string clean_text(std::string_view text) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());

  std::string out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::size_t cut = detail::url_start(token);
    if (cut != std::string::npos) token.resize(cut);
    if (!token.empty()) {
      if (!out.empty()) out.push_back(' ');
      out += token;
    }
    token.clear();
  };

  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    if (u_isUWhiteSpace(c) || u_iscntrl(c)) {
      flush();
      continue;
    }
    if (is_stripped_emoji(static_cast<char32_t>(c))) continue;
    char buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    token.append(buf, static_cast<std::size_t>(n));
  }
  flush();
  return out;
}

// Cleans every turn (and speaker label), drops turns left empty, and
// returns nullopt when fewer than two turns survive.
inline std::optional<Dialogue> clean_dialogue(const Dialogue& dialogue) {
  Dialogue cleaned;
  cleaned.id = dialogue.id;
  cleaned.turns.reserve(dialogue.turns.size());
  for (const Turn& turn : dialogue.turns) {
    Turn t;
    t.text = clean_text(turn.text);
    if (t.text.empty()) continue;
    if (turn.speaker) {
      std::string speaker = clean_text(*turn.speaker);
      if (!speaker.empty()) t.speaker = std::move(speaker);
    }
    cleaned.turns.push_back(std::move(t));
  }
  if (cleaned.turns.size() < 2) return std::nullopt;
  return cleaned;
}

}  // namespace dialsum
