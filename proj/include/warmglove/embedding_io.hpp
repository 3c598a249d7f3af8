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

// Embeddings in the GloVe text format: `token v1 v2 ... vd` per line, no
// header, single spaces between fields.

#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "warmglove/common.hpp"
#include "warmglove/cooccur.hpp"
#include "warmglove/corpus.hpp"
#include "warmglove/objective.hpp"

namespace warmglove {

struct EmbeddingRecord {
  std::string token;
  std::vector<double> vector;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

// Ordered records with unique tokens and one shared dimension.
class EmbeddingFile {
 public:
  EmbeddingFile() = default;

  explicit EmbeddingFile(std::vector<EmbeddingRecord> records) {
    for (auto& r : records) add(std::move(r));
  }

  void add(EmbeddingRecord record) {
    if (record.vector.empty()) throw Error("embedding for '" + record.token + "' has no components");
    if (records_.empty()) {
      dim_ = record.vector.size();
    } else if (record.vector.size() != dim_) {
      throw ShapeError("embedding for '" + record.token + "' has dimension " + std::to_string(record.vector.size()) +
                       ", expected " + std::to_string(dim_));
    }
    if (!index_.emplace(record.token, records_.size()).second) {
      throw Error("duplicate embedding token '" + record.token + "'");
    }
    records_.push_back(std::move(record));
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t dim() const { return dim_; }
  std::span<const EmbeddingRecord> records() const { return records_; }

  const std::vector<double>* find(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? nullptr : &records_[it->second].vector;
  }

 private:
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
};

inline EmbeddingFile read_embeddings(std::istream& in, const std::string& source) {
  EmbeddingFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError(source, line_no, "expected a token followed by vector components");
    EmbeddingRecord record{std::string(fields[0]), {}};
    record.vector.reserve(fields.size() - 1);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!detail::parse_field(fields[k], v)) {
        throw ParseError(source, line_no, "invalid number '" + std::string(fields[k]) + "'");
      }
      record.vector.push_back(v);
    }
    if (!file.empty() && record.vector.size() != file.dim()) {
      throw ParseError(source, line_no,
                       "dimension mismatch: " + std::to_string(record.vector.size()) + " components, expected " +
                           std::to_string(file.dim()));
    }
    if (file.find(record.token) != nullptr) {
      throw ParseError(source, line_no, "duplicate token '" + record.token + "'");
    }
    file.add(std::move(record));
  }
  return file;
}

inline EmbeddingFile read_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings '" + path + "'");
  return read_embeddings(in, path);
}

// Six significant digits per component.
inline void write_embeddings(std::span<const EmbeddingRecord> records, std::ostream& out) {
  char buf[32];
  for (const auto& r : records) {
    out << r.token;
    for (double v : r.vector) {
      std::snprintf(buf, sizeof buf, "%.6g", v);
      out << ' ' << buf;
    }
    out << '\n';
  }
}

inline void write_embeddings(std::span<const EmbeddingRecord> records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_embeddings(records, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

// Pairs each row of `embeddings` with the matching vocabulary token.
inline std::vector<EmbeddingRecord> to_records(const Matrix& embeddings, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(embeddings.rows()) != vocab.size()) {
    throw ShapeError("embedding matrix rows do not match the vocabulary size");
  }
  std::vector<EmbeddingRecord> records;
  records.reserve(vocab.size());
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const auto row = embeddings.row(i);
    records.push_back({vocab.token(static_cast<std::size_t>(i)), std::vector<double>(row.begin(), row.end())});
  }
  return records;
}

// R = vocabulary words that have a vector in `embeddings`. Matching is
// case-sensitive.
inline PriorEmbeddings resolve_priors(const EmbeddingFile& embeddings, const Vocabulary& vocab, std::size_t dim) {
  if (!embeddings.empty() && embeddings.dim() != dim) {
    throw ShapeError("prior embeddings have dimension " + std::to_string(embeddings.dim()) +
                     " but training uses dimension " + std::to_string(dim));
  }
  PriorEmbeddings priors;
  std::vector<const std::vector<double>*> rows;
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    if (const auto* v = embeddings.find(vocab.token(id))) {
      priors.ids.push_back(id);
      rows.push_back(v);
    }
  }
  priors.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < dim; ++c) {
      priors.vectors(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = (*rows[k])[c];
    }
  }
  return priors;
}

}  // namespace warmglove
