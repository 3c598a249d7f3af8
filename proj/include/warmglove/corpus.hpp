//
// Copyright (C) 2026 The warmglove Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Tokenization and frequency-thresholded vocabularies.
//
// The tokenizer splits on Unicode whitespace, keeps lexicon emoticons
// intact, peels leading and trailing punctuation runs off each chunk and
// downcases every word that is not written in all capitals.

#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "warmglove/common.hpp"

namespace warmglove {

using Tokens = std::vector<std::string>;

struct TokenizerConfig {
  // Strings kept as single tokens, matched before punctuation peeling.
  std::unordered_set<std::string> emoticons;
  bool punctuation_split = true;
};

// One emoticon per line. Blank lines are ignored; surrounding whitespace is
// trimmed.
inline std::unordered_set<std::string> load_emoticon_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open emoticon lexicon '" + path + "'");
  std::unordered_set<std::string> lexicon;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    lexicon.insert(line.substr(first, last - first + 1));
  }
  return lexicon;
}

// The lexicon shipped in data/emoticons.txt.
inline std::string default_emoticon_path() {
#ifdef WARMGLOVE_DATA_DIR
  return std::string(WARMGLOVE_DATA_DIR) + "/emoticons.txt";
#else
  return "data/emoticons.txt";
#endif
}

namespace detail {

// Decodes one UTF-8 sequence starting at `pos`. Returns the code point and
// its byte length; malformed bytes decode as themselves with length 1.
inline std::pair<char32_t, std::size_t> decode_utf8(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t len = 1;
  char32_t cp = lead;
  if (lead >= 0xF0 && lead < 0xF8) {
    len = 4;
    cp = lead & 0x07;
  } else if (lead >= 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if (lead >= 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else {
    return {cp, 1};
  }
  if (lead >= 0xF8 || pos + len > s.size()) return {lead, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(s[pos + k]);
    if ((c & 0xC0) != 0x80) return {lead, 1};
    cp = (cp << 6) | (c & 0x3F);
  }
  return {cp, len};
}

inline bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

inline bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  // General punctuation block (dashes, curly quotes, ellipsis) and guillemets.
  return (cp >= 0x2010 && cp <= 0x2027) || cp == 0xAB || cp == 0xBB || cp == 0xBF || cp == 0xA1;
}

// Downcase unless the word has at least two cased ASCII letters and no
// lowercase ones. Non-ASCII bytes pass through untouched.
inline std::string normalize_case(std::string_view word) {
  std::size_t upper = 0;
  std::size_t lower = 0;
  for (char c : word) {
    if (c >= 'A' && c <= 'Z') ++upper;
    if (c >= 'a' && c <= 'z') ++lower;
  }
  std::string out(word);
  if (upper >= 2 && lower == 0) return out;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Splits a punctuation run into lexicon emoticons (longest match first) and
// maximal runs of remaining punctuation.
inline void emit_punctuation_run(std::string_view run, const TokenizerConfig& cfg, Tokens& out) {
  std::size_t longest = 0;
  for (const auto& e : cfg.emoticons) longest = std::max(longest, e.size());

  std::string pending;
  std::size_t pos = 0;
  while (pos < run.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(longest, run.size() - pos); len > 0; --len) {
      if (cfg.emoticons.count(std::string(run.substr(pos, len))) != 0) {
        matched = len;
        break;
      }
    }
    if (matched > 0) {
      if (!pending.empty()) out.push_back(std::exchange(pending, {}));
      out.emplace_back(run.substr(pos, matched));
      pos += matched;
    } else {
      const auto [cp, len] = decode_utf8(run, pos);
      pending.append(run.substr(pos, len));
      pos += len;
    }
  }
  if (!pending.empty()) out.push_back(std::move(pending));
}

inline void tokenize_chunk(std::string_view chunk, const TokenizerConfig& cfg, Tokens& out) {
  if (cfg.emoticons.count(std::string(chunk)) != 0) {
    out.emplace_back(chunk);
    return;
  }
  if (!cfg.punctuation_split) {
    out.push_back(normalize_case(chunk));
    return;
  }

  // Byte offsets of every code point that is not punctuation.
  std::size_t word_begin = chunk.size();
  std::size_t word_end = 0;
  for (std::size_t pos = 0; pos < chunk.size();) {
    const auto [cp, len] = decode_utf8(chunk, pos);
    if (!is_punctuation(cp)) {
      word_begin = std::min(word_begin, pos);
      word_end = pos + len;
    }
    pos += len;
  }
  if (word_begin == chunk.size()) {
    emit_punctuation_run(chunk, cfg, out);
    return;
  }
  if (word_begin > 0) emit_punctuation_run(chunk.substr(0, word_begin), cfg, out);
  out.push_back(normalize_case(chunk.substr(word_begin, word_end - word_begin)));
  if (word_end < chunk.size()) emit_punctuation_run(chunk.substr(word_end), cfg, out);
}

}  // namespace detail

inline Tokens tokenize(std::string_view text, const TokenizerConfig& cfg = {}) {
  Tokens out;
  std::size_t chunk_begin = 0;
  bool in_chunk = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = detail::decode_utf8(text, pos);
    if (detail::is_unicode_space(cp)) {
      if (in_chunk) detail::tokenize_chunk(text.substr(chunk_begin, pos - chunk_begin), cfg, out);
      in_chunk = false;
    } else if (!in_chunk) {
      chunk_begin = pos;
      in_chunk = true;
    }
    pos += len;
  }
  if (in_chunk) detail::tokenize_chunk(text.substr(chunk_begin), cfg, out);
  return out;
}

// Raw token frequencies. Shards counted separately merge by addition.
class TokenCounts {
 public:
  void add(std::string_view token, std::size_t n = 1) { counts_[std::string(token)] += n; }

  void add(std::span<const std::string> tokens) {
    for (const auto& t : tokens) counts_[t] += 1;
  }

  void merge(const TokenCounts& other) {
    for (const auto& [token, n] : other.counts_) counts_[token] += n;
  }

  const std::unordered_map<std::string, std::size_t>& counts() const { return counts_; }

 private:
  std::unordered_map<std::string, std::size_t> counts_;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  // Keeps tokens seen at least `min_count` times. Ids follow descending
  // frequency, ties broken by byte-wise token order.
  static Vocabulary build(const TokenCounts& counts, std::size_t min_count) {
    if (min_count < 1) throw Error("min_count must be at least 1");
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [token, n] : counts.counts()) {
      if (n >= min_count) kept.emplace_back(token, n);
    }
    if (kept.empty()) {
      throw Error("no token occurs at least " + std::to_string(min_count) + " times");
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary vocab;
    vocab.min_count_ = min_count;
    for (auto& [token, n] : kept) vocab.push(std::move(token), n);
    return vocab;
  }

  // Rebuilds a vocabulary from (token, count) rows already in id order.
  static Vocabulary from_rows(std::vector<std::pair<std::string, std::size_t>> rows) {
    Vocabulary vocab;
    vocab.min_count_ = rows.empty() ? 0 : rows.front().second;
    for (auto& [token, n] : rows) {
      if (vocab.index_.count(token) != 0) throw Error("duplicate vocabulary token '" + token + "'");
      vocab.min_count_ = std::min(vocab.min_count_, n);
      vocab.push(std::move(token), n);
    }
    return vocab;
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t min_count() const { return min_count_; }

  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::size_t count(std::size_t id) const { return counts_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<std::size_t> id(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view token) const { return id(token).has_value(); }

 private:
  void push(std::string token, std::size_t n) {
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    counts_.push_back(n);
  }

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t min_count_ = 1;
};

inline Vocabulary build_vocabulary(std::span<const std::string> tokens, std::size_t min_count) {
  TokenCounts counts;
  counts.add(tokens);
  return Vocabulary::build(counts, min_count);
}

inline Vocabulary build_vocabulary(std::span<const Tokens> docs, std::size_t min_count) {
  TokenCounts counts;
  for (const auto& doc : docs) counts.add(doc);
  return Vocabulary::build(counts, min_count);
}

// `token<TAB>count` per line; the line number is the id.
inline void write_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.token(i) << '\t' << vocab.count(i) << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

inline Vocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary '" + path + "'");
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(path, line_no, "expected token<TAB>count");
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoul(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "invalid count '" + line.substr(tab + 1) + "'");
    }
    rows.emplace_back(line.substr(0, tab), n);
  }
  return Vocabulary::from_rows(std::move(rows));
}

}  // namespace warmglove
