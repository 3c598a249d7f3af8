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

#include <span>
#include <string>
#include <vector>

#include "warmglove/embedding_io.hpp"

namespace warmglove {

struct DocumentVector {
  std::vector<double> vector;
  std::size_t tokens_used = 0;
  std::size_t tokens_oov = 0;
};

// Elementwise sum of the vectors of known tokens; unknown tokens are counted
// and skipped.
inline DocumentVector sum_features(std::span<const std::string> tokens, const EmbeddingFile& embeddings) {
  if (embeddings.empty()) throw Error("cannot featurize with an empty embedding file");
  DocumentVector doc{std::vector<double>(embeddings.dim(), 0.0), 0, 0};
  for (const auto& token : tokens) {
    const auto* v = embeddings.find(token);
    if (v == nullptr) {
      ++doc.tokens_oov;
      continue;
    }
    ++doc.tokens_used;
    for (std::size_t k = 0; k < v->size(); ++k) doc.vector[k] += (*v)[k];
  }
  return doc;
}

}  // namespace warmglove
