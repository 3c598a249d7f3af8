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

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "warmglove/common.hpp"
#include "warmglove/corpus.hpp"

namespace warmglove {

// One stored cell of the upper triangle (row <= col).
struct CooccurrenceEntry {
  std::size_t row;
  std::size_t col;
  double value;

  friend bool operator==(const CooccurrenceEntry&, const CooccurrenceEntry&) = default;
};

// Sparse symmetric matrix of weighted co-occurrence counts. Only the upper
// triangle is stored, sorted by (row, col); X[j][i] is implied by X[i][j].
// Every stored value is positive and absent cells are exactly zero.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;

  // `window` is 0 when the matrix was not built from text.
  CooccurrenceMatrix(std::size_t dim, std::vector<CooccurrenceEntry> upper, std::size_t window = 0)
      : dim_(dim), window_(window), entries_(std::move(upper)) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      if (e.row > e.col) throw Error("co-occurrence entries must satisfy row <= col");
      if (e.col >= dim_) throw ShapeError("co-occurrence entry outside a " + std::to_string(dim_) + "-word matrix");
      if (!(e.value > 0.0) || !std::isfinite(e.value)) throw Error("co-occurrence values must be finite and positive");
      if (k > 0 && !key_less(entries_[k - 1], e)) throw Error("co-occurrence entries must be sorted and unique");
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t window() const { return window_; }
  std::span<const CooccurrenceEntry> entries() const { return entries_; }

  // Non-zero cells of the full matrix; off-diagonal entries count twice.
  std::size_t nonzero_cells() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.row == e.col ? 1 : 2;
    return n;
  }

  double at(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const CooccurrenceEntry probe{i, j, 0.0};
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, key_less);
    return it != entries_.end() && it->row == i && it->col == j ? it->value : 0.0;
  }

  // Calls fn(i, j, x) for every non-zero cell of the full matrix.
  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    for (const auto& e : entries_) {
      fn(e.row, e.col, e.value);
      if (e.row != e.col) fn(e.col, e.row, e.value);
    }
  }

  Matrix to_dense() const {
    Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for_each_cell([&](std::size_t i, std::size_t j, double x) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
    });
    return dense;
  }

  friend bool operator==(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  static bool key_less(const CooccurrenceEntry& a, const CooccurrenceEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  }

  std::size_t dim_ = 0;
  std::size_t window_ = 0;
  std::vector<CooccurrenceEntry> entries_;
};

// Hash-keyed accumulation of upper-triangle cells.
class CooccurrenceAccumulator {
 public:
  explicit CooccurrenceAccumulator(std::size_t dim) : dim_(dim) {}

  // X[i][j] += w and X[j][i] += w. On the diagonal both increments land on
  // the same cell and are applied one after the other.
  void add_symmetric(std::size_t i, std::size_t j, double w) {
    if (i > j) std::swap(i, j);
    double& cell = cells_[key(i, j)];
    cell += w;
    if (i == j) cell += w;
  }

  void merge(const CooccurrenceAccumulator& other) {
    if (other.dim_ != dim_) throw ShapeError("cannot merge accumulators of different dimension");
    for (const auto& [k, v] : other.cells_) cells_[k] += v;
  }

  CooccurrenceMatrix finalize(std::size_t window = 0) const {
    std::vector<CooccurrenceEntry> upper;
    upper.reserve(cells_.size());
    for (const auto& [k, v] : cells_) {
      if (v > 0.0) upper.push_back({static_cast<std::size_t>(k >> 32), static_cast<std::size_t>(k & 0xffffffffu), v});
    }
    std::sort(upper.begin(), upper.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return CooccurrenceMatrix(dim_, std::move(upper), window);
  }

 private:
  static std::uint64_t key(std::size_t i, std::size_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
  }

  std::size_t dim_;
  std::unordered_map<std::uint64_t, double> cells_;
};

// Adds one document's counts: every in-vocabulary token at position p pairs
// with every in-vocabulary token at p - d (1 <= d <= window) with weight 1/d.
// Out-of-vocabulary tokens keep their positions but contribute nothing.
inline void accumulate_document(CooccurrenceAccumulator& acc, std::span<const std::string> doc,
                                const Vocabulary& vocab, std::size_t window) {
  std::vector<std::optional<std::size_t>> ids;
  ids.reserve(doc.size());
  for (const auto& token : doc) ids.push_back(vocab.id(token));

  for (std::size_t p = 0; p < ids.size(); ++p) {
    if (!ids[p]) continue;
    const std::size_t reach = std::min(window, p);
    for (std::size_t d = 1; d <= reach; ++d) {
      const auto& left = ids[p - d];
      if (!left) continue;
      acc.add_symmetric(*ids[p], *left, 1.0 / static_cast<double>(d));
    }
  }
}

inline CooccurrenceMatrix build_cooccurrence(std::span<const Tokens> docs, const Vocabulary& vocab,
                                             std::size_t window) {
  if (vocab.empty()) throw Error("cannot build a co-occurrence matrix over an empty vocabulary");
  if (window < 1) throw Error("window must be at least 1");
  if (vocab.size() > 0xffffffffu) throw Error("vocabulary too large for 32-bit cell keys");
  CooccurrenceAccumulator acc(vocab.size());
  for (const auto& doc : docs) accumulate_document(acc, doc, vocab, window);
  return acc.finalize(window);
}

// Entrywise sum of two matrices over the same vocabulary.
inline CooccurrenceMatrix operator+(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b) {
  if (a.dim() != b.dim()) throw ShapeError("cannot add co-occurrence matrices of different dimension");
  std::vector<CooccurrenceEntry> out;
  out.reserve(a.entries().size() + b.entries().size());
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  const auto less = [](const CooccurrenceEntry& x, const CooccurrenceEntry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  };
  while (ia != a.entries().end() || ib != b.entries().end()) {
    if (ib == b.entries().end() || (ia != a.entries().end() && less(*ia, *ib))) {
      out.push_back(*ia++);
    } else if (ia == a.entries().end() || less(*ib, *ia)) {
      out.push_back(*ib++);
    } else {
      out.push_back({ia->row, ia->col, ia->value + ib->value});
      ++ia;
      ++ib;
    }
  }
  return CooccurrenceMatrix(a.dim(), std::move(out), a.window() == b.window() ? a.window() : 0);
}

struct MatrixStats {
  double nonzero_fraction = 0.0;
  double total_mass = 0.0;
};

inline MatrixStats matrix_stats(const CooccurrenceMatrix& x) {
  MatrixStats stats;
  if (x.dim() == 0) return stats;
  const double cells = static_cast<double>(x.dim()) * static_cast<double>(x.dim());
  stats.nonzero_fraction = static_cast<double>(x.nonzero_cells()) / cells;
  for (const auto& e : x.entries()) stats.total_mass += e.row == e.col ? e.value : 2.0 * e.value;
  return stats;
}

// Text format: a `dim nnz` header, then `i j value` for each stored cell
// with i <= j, sorted by (i, j).
inline void write_cooccurrence(const CooccurrenceMatrix& x, std::ostream& out) {
  out << x.dim() << ' ' << x.entries().size() << '\n';
  char buf[64];
  for (const auto& e : x.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.row << ' ' << e.col << ' ' << buf << '\n';
  }
}

inline void write_cooccurrence(const CooccurrenceMatrix& x, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_cooccurrence(x, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace detail {

template <class T>
bool parse_field(std::string_view field, T& value) {
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

}  // namespace detail

inline CooccurrenceMatrix read_cooccurrence(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing `dim nnz` header");
  auto fields = detail::split_fields(line);
  std::size_t dim = 0;
  std::size_t nnz = 0;
  if (fields.size() != 2 || !detail::parse_field(fields[0], dim) || !detail::parse_field(fields[1], nnz)) {
    throw ParseError(source, 1, "expected `dim nnz` header");
  }
  std::vector<CooccurrenceEntry> upper;
  upper.reserve(nnz);
  std::size_t line_no = 1;
  while (upper.size() < nnz && std::getline(in, line)) {
    ++line_no;
    fields = detail::split_fields(line);
    CooccurrenceEntry e{};
    if (fields.size() != 3 || !detail::parse_field(fields[0], e.row) || !detail::parse_field(fields[1], e.col) ||
        !detail::parse_field(fields[2], e.value)) {
      throw ParseError(source, line_no, "expected `i j value`");
    }
    if (e.row > e.col) throw ParseError(source, line_no, "entries must satisfy i <= j");
    if (e.col >= dim) throw ParseError(source, line_no, "index out of range for dim " + std::to_string(dim));
    if (!(e.value > 0.0) || !std::isfinite(e.value)) throw ParseError(source, line_no, "value must be positive");
    if (!upper.empty() && (upper.back().row > e.row || (upper.back().row == e.row && upper.back().col >= e.col))) {
      throw ParseError(source, line_no, "entries must be sorted by (i, j) without duplicates");
    }
    upper.push_back(e);
  }
  if (upper.size() != nnz) {
    throw ParseError(source, 0, "header promises " + std::to_string(nnz) + " entries, found " +
                                    std::to_string(upper.size()));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::split_fields(line).empty()) throw ParseError(source, line_no, "unexpected trailing data");
  }
  return CooccurrenceMatrix(dim, std::move(upper));
}

inline CooccurrenceMatrix read_cooccurrence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open co-occurrence file '" + path + "'");
  return read_cooccurrence(in, path);
}

}  // namespace warmglove
