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

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "warmglove/common.hpp"
#include "warmglove/cooccur.hpp"
#include "warmglove/objective.hpp"

namespace warmglove {

namespace detail {

// Sample standard deviation over every coordinate of every prior vector.
inline double prior_stddev(const PriorEmbeddings& priors) {
  const auto n = static_cast<double>(priors.vectors.size());
  if (n < 2) return 0.0;
  const double mean = priors.vectors.mean();
  return std::sqrt((priors.vectors.array() - mean).square().sum() / (n - 1.0));
}

}  // namespace detail

// W and Wt are uniform in (-0.5/dim, 0.5/dim), biases are zero. With priors,
// rows of words outside R are drawn wider so that w + wt has the sample
// standard deviation of the prior vectors. The random stream does not depend
// on the priors, so anchored rows match a prior-free initialization.
inline ModelParams init_params(std::size_t vocab_size, const HyperParams& hp, const PriorEmbeddings* priors = nullptr) {
  if (vocab_size < 1) throw Error("vocabulary must contain at least one word");
  hp.validate();
  if (priors != nullptr) priors->validate(vocab_size, hp.dim);

  ModelParams params = ModelParams::zeros(vocab_size, hp.dim);
  const double default_half_width = 0.5 / static_cast<double>(hp.dim);

  std::vector<double> half_width(vocab_size, default_half_width);
  std::vector<bool> anchored(vocab_size, false);
  if (priors != nullptr && !priors->empty()) {
    for (auto id : priors->ids) anchored[id] = true;
    const double s = detail::prior_stddev(*priors);
    if (s > 0.0) {
      // Uniform(-a, a) has variance a^2 / 3; the sum of two has 2 a^2 / 3.
      const double oov_half_width = s * std::sqrt(1.5);
      for (std::size_t i = 0; i < vocab_size; ++i) {
        if (!anchored[i]) half_width[i] = oov_half_width;
      }
    }
  }

  std::mt19937_64 engine(detail::derive_seed(hp.seed, 0x1417));
  for (Matrix* block : {&params.W, &params.W_tilde}) {
    for (Eigen::Index i = 0; i < block->rows(); ++i) {
      const double a = half_width[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < block->cols(); ++k) {
        (*block)(i, k) = (2.0 * detail::uniform01(engine) - 1.0) * a;
      }
    }
  }

  if (hp.init_at_priors && priors != nullptr) {
    for (std::size_t k = 0; k < priors->size(); ++k) {
      const auto i = static_cast<Eigen::Index>(priors->ids[k]);
      params.W.row(i) = 0.5 * priors->vectors.row(static_cast<Eigen::Index>(k));
      params.W_tilde.row(i) = params.W.row(i);
    }
  }
  return params;
}

// Sum of squared gradients per parameter, seeded with `initial`.
struct AdagradState {
  ParamBlocks accum;

  static AdagradState like(const ModelParams& params, double initial = 1.0) {
    return {ParamBlocks::constant(params.vocab_size(), params.dim(), initial)};
  }
};

// a <- a + g^2, then theta <- theta - lr * g / sqrt(a), elementwise.
inline void adagrad_step(ModelParams& params, AdagradState& state, const Gradients& grads, double learning_rate) {
  params.check_consistent();
  grads.check_consistent();
  state.accum.check_consistent();
  if (grads.vocab_size() != params.vocab_size() || grads.dim() != params.dim() ||
      state.accum.vocab_size() != params.vocab_size() || state.accum.dim() != params.dim()) {
    throw ShapeError("gradient, accumulator and parameter shapes differ");
  }
  const auto update = [learning_rate](auto& theta, auto& accum, const auto& g) {
    accum.array() += g.array().square();
    theta.array() -= learning_rate * g.array() / accum.array().sqrt();
  };
  update(params.W, state.accum.W, grads.W);
  update(params.W_tilde, state.accum.W_tilde, grads.W_tilde);
  update(params.b, state.accum.b, grads.b);
  update(params.b_tilde, state.accum.b_tilde, grads.b_tilde);
}

struct TrainReport {
  // costs[t] is the objective at the start of epoch t.
  std::vector<double> costs;
  std::vector<double> seconds;
  std::size_t epochs = 0;
};

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

using EpochCallback = std::function<void(std::size_t epoch, double cost, double seconds)>;

// The priors that take part in training: none when mu is zero or R is empty,
// which makes such runs identical to plain GloVe.
inline const PriorEmbeddings* active_priors(const PriorEmbeddings* priors, const HyperParams& hp) {
  return priors != nullptr && !priors->empty() && hp.mu > 0.0 ? priors : nullptr;
}

// Full-batch AdaGrad from the given starting point.
inline TrainResult train_from(ModelParams initial, const DenseCooccurrence& dense, const HyperParams& hp,
                              const PriorEmbeddings* priors = nullptr, const EpochCallback& on_epoch = {}) {
  hp.validate();
  priors = active_priors(priors, hp);
  detail::check_shapes(initial, dense.size(), priors);

  TrainResult result{std::move(initial), {}};
  result.report.costs.reserve(hp.epochs);
  result.report.seconds.reserve(hp.epochs);
  AdagradState state = AdagradState::like(result.params);
  Matrix workspace;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const Evaluation eval = evaluate_vectorized(result.params, dense, priors, hp, workspace);
    if (!std::isfinite(eval.cost)) {
      throw DivergenceError("cost became non-finite at epoch " + std::to_string(epoch) +
                            "; try a smaller learning rate");
    }
    adagrad_step(result.params, state, eval.grads, hp.learning_rate);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.report.costs.push_back(eval.cost);
    result.report.seconds.push_back(seconds);
    result.report.epochs = epoch + 1;
    if (on_epoch) on_epoch(epoch, eval.cost, seconds);
  }
  return result;
}

inline TrainResult train(const CooccurrenceMatrix& x, const HyperParams& hp, const PriorEmbeddings* priors = nullptr,
                         const EpochCallback& on_epoch = {}) {
  if (x.dim() < 1) throw Error("co-occurrence matrix is empty");
  hp.validate();
  priors = active_priors(priors, hp);
  ModelParams initial = init_params(x.dim(), hp, priors);
  return train_from(std::move(initial), DenseCooccurrence::prepare(x, hp), hp, priors, on_epoch);
}

// Row i is w_i + wt_i.
inline Matrix compose_embeddings(const ModelParams& params) {
  params.check_consistent();
  return params.W + params.W_tilde;
}

}  // namespace warmglove
