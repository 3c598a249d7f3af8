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

// The GloVe weighted least-squares objective with the retrofitting penalty
//
//   J = sum_ij f(X_ij) (w_i . wt_j + b_i + bt_j - log X_ij)^2
//       + mu * sum_{i in R} |w_i + wt_i - r_i|^2
//
// in two independent forms. The vectorized form works on dense matrices:
// with g(X) equal to log X on non-zero cells and to an arbitrary constant k
// elsewhere, M = W Wt^T + b 1^T + 1 bt^T - g(X) and J = sum f(X) * M * M
// (elementwise), which is exact because f(0) = 0. The reference form walks
// the non-zero cells one pair at a time.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "warmglove/common.hpp"
#include "warmglove/cooccur.hpp"

namespace warmglove {

struct HyperParams {
  std::size_t dim = 50;
  double alpha = 0.75;
  double x_max = 100.0;
  double learning_rate = 0.05;
  double mu = 0.1;
  std::size_t epochs = 50000;
  // Stand-in for log 0 in the dense objective; has no effect on results.
  double g_fill = 0.0;
  std::uint64_t seed = 42;
  // Start anchored words at w_i = wt_i = r_i / 2 instead of randomly.
  bool init_at_priors = false;

  void validate() const {
    if (dim == 0) throw Error("dim must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw Error("x_max must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw Error("learning rate must be positive");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error("mu must be non-negative");
    if (!std::isfinite(g_fill)) throw Error("g_fill must be finite");
  }
};

// The four parameter blocks. The same layout carries gradients and AdaGrad
// accumulators.
struct ParamBlocks {
  Matrix W;
  Matrix W_tilde;
  Vector b;
  Vector b_tilde;

  static ParamBlocks constant(std::size_t vocab_size, std::size_t dim, double value) {
    const auto n = static_cast<Eigen::Index>(vocab_size);
    const auto d = static_cast<Eigen::Index>(dim);
    return {Matrix::Constant(n, d, value), Matrix::Constant(n, d, value), Vector::Constant(n, value),
            Vector::Constant(n, value)};
  }

  static ParamBlocks zeros(std::size_t vocab_size, std::size_t dim) { return constant(vocab_size, dim, 0.0); }

  std::size_t vocab_size() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(W.cols()); }

  void check_consistent() const {
    if (W_tilde.rows() != W.rows() || W_tilde.cols() != W.cols() || b.size() != W.rows() ||
        b_tilde.size() != W.rows()) {
      throw ShapeError("parameter blocks disagree on vocabulary size or dimension");
    }
  }

  bool all_finite() const { return W.allFinite() && W_tilde.allFinite() && b.allFinite() && b_tilde.allFinite(); }

  friend bool operator==(const ParamBlocks& a, const ParamBlocks& b) {
    return a.W.rows() == b.W.rows() && a.W.cols() == b.W.cols() && a.W == b.W && a.W_tilde == b.W_tilde &&
           a.b == b.b && a.b_tilde == b.b_tilde;
  }
};

using ModelParams = ParamBlocks;
using Gradients = ParamBlocks;

// Prior vectors r_i for the anchor set R. Row k of `vectors` belongs to
// word id `ids[k]`; ids are strictly increasing.
struct PriorEmbeddings {
  std::vector<std::size_t> ids;
  Matrix vectors;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }

  void validate(std::size_t vocab_size, std::size_t dim) const {
    if (static_cast<std::size_t>(vectors.rows()) != ids.size()) {
      throw ShapeError("prior ids and prior vectors disagree in count");
    }
    if (!empty() && this->dim() != dim) {
      throw ShapeError("prior dimension " + std::to_string(this->dim()) + " does not match model dimension " +
                       std::to_string(dim));
    }
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] >= vocab_size) throw ShapeError("prior id outside the vocabulary");
      if (k > 0 && ids[k] <= ids[k - 1]) throw Error("prior ids must be strictly increasing");
    }
  }
};

// min(1, (x / x_max)^alpha), with f(0) = 0 exactly.
inline double weight_f(double x, double alpha, double x_max) {
  if (x < 0.0) throw Error("weight_f is undefined for negative counts");
  if (x == 0.0) return 0.0;
  if (x >= x_max) return 1.0;
  return std::pow(x / x_max, alpha);
}

inline double g_fill(double x, double k) { return x == 0.0 ? k : std::log(x); }

// f(X) and g(X) laid out densely, computed once per matrix.
struct DenseCooccurrence {
  Matrix weights;
  Matrix log_fill;

  static DenseCooccurrence prepare(const CooccurrenceMatrix& x, const HyperParams& hp) {
    const auto n = static_cast<Eigen::Index>(x.dim());
    DenseCooccurrence dense{Matrix::Zero(n, n), Matrix::Constant(n, n, hp.g_fill)};
    x.for_each_cell([&](std::size_t i, std::size_t j, double value) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      dense.weights(r, c) = weight_f(value, hp.alpha, hp.x_max);
      dense.log_fill(r, c) = g_fill(value, hp.g_fill);
    });
    return dense;
  }

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

struct Evaluation {
  double cost = 0.0;
  Gradients grads;
};

namespace detail {

inline void check_shapes(const ModelParams& params, std::size_t matrix_dim, const PriorEmbeddings* priors) {
  params.check_consistent();
  if (matrix_dim != params.vocab_size()) {
    throw ShapeError("co-occurrence matrix has dimension " + std::to_string(matrix_dim) + " but the model has " +
                     std::to_string(params.vocab_size()) + " words");
  }
  if (priors != nullptr) priors->validate(params.vocab_size(), params.dim());
}

inline bool penalty_active(const PriorEmbeddings* priors, const HyperParams& hp) {
  return priors != nullptr && !priors->empty() && hp.mu != 0.0;
}

// Fills `m` with M = W Wt^T + b 1^T + 1 bt^T - g(X).
inline void residual_matrix(const ModelParams& params, const DenseCooccurrence& dense, Matrix& m) {
  m.resize(params.W.rows(), params.W.rows());
  m.noalias() = params.W * params.W_tilde.transpose();
  m.array().colwise() += params.b.array();
  m.array().rowwise() += params.b_tilde.transpose().array();
  m -= dense.log_fill;
}

inline double penalty_cost(const ModelParams& params, const PriorEmbeddings& priors, double mu) {
  double sum = 0.0;
  for (std::size_t k = 0; k < priors.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(priors.ids[k]);
    sum += (params.W.row(i) + params.W_tilde.row(i) - priors.vectors.row(static_cast<Eigen::Index>(k)))
               .squaredNorm();
  }
  return mu * sum;
}

}  // namespace detail

// Cost and gradients from the dense formulation. `workspace` holds the
// |V| x |V| residual matrix between calls.
inline Evaluation evaluate_vectorized(const ModelParams& params, const DenseCooccurrence& dense,
                                      const PriorEmbeddings* priors, const HyperParams& hp, Matrix& workspace) {
  detail::check_shapes(params, dense.size(), priors);
  const Eigen::Index n = params.W.rows();
  Matrix& m = workspace;
  m.resize(n, n);
  m.noalias() = params.W * params.W_tilde.transpose();

  // One pass per row: finish M, take f * M^2 into the cost, and overwrite M
  // with E = 2 f(X) * M. Rows are summed in order, so the result does not
  // depend on the thread count.
  Evaluation out;
  out.grads.b.resize(n);
  out.grads.b_tilde = Vector::Zero(n);
  const auto bt = params.b_tilde.transpose().array();
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = m.row(i).array();
    const auto f = dense.weights.row(i).array();
    row += params.b[i] + bt - dense.log_fill.row(i).array();
    out.cost += (f * row.square()).sum();
    row *= 2.0 * f;
    out.grads.b[i] = row.sum();
    out.grads.b_tilde += m.row(i).transpose();
  }
  out.grads.W.noalias() = m * params.W_tilde;
  out.grads.W_tilde.noalias() = m.transpose() * params.W;

  if (detail::penalty_active(priors, hp)) {
    out.cost += detail::penalty_cost(params, *priors, hp.mu);
    for (std::size_t k = 0; k < priors->size(); ++k) {
      const auto i = static_cast<Eigen::Index>(priors->ids[k]);
      const Eigen::RowVectorXd step =
          2.0 * hp.mu * (params.W.row(i) + params.W_tilde.row(i) - priors->vectors.row(static_cast<Eigen::Index>(k)));
      out.grads.W.row(i) += step;
      out.grads.W_tilde.row(i) += step;
    }
  }
  return out;
}

inline Evaluation evaluate_vectorized(const ModelParams& params, const DenseCooccurrence& dense,
                                      const PriorEmbeddings* priors, const HyperParams& hp) {
  Matrix workspace;
  return evaluate_vectorized(params, dense, priors, hp, workspace);
}

inline double cost_vectorized(const ModelParams& params, const DenseCooccurrence& dense,
                              const PriorEmbeddings* priors, const HyperParams& hp) {
  detail::check_shapes(params, dense.size(), priors);
  Matrix m;
  detail::residual_matrix(params, dense, m);
  double cost = (dense.weights.array() * m.array().square()).sum();
  if (detail::penalty_active(priors, hp)) cost += detail::penalty_cost(params, *priors, hp.mu);
  return cost;
}

inline double cost_vectorized(const ModelParams& params, const CooccurrenceMatrix& x,
                              const PriorEmbeddings* priors, const HyperParams& hp) {
  detail::check_shapes(params, x.dim(), priors);
  return cost_vectorized(params, DenseCooccurrence::prepare(x, hp), priors, hp);
}

inline Gradients gradients_vectorized(const ModelParams& params, const DenseCooccurrence& dense,
                                      const PriorEmbeddings* priors, const HyperParams& hp) {
  return evaluate_vectorized(params, dense, priors, hp).grads;
}

inline Gradients gradients_vectorized(const ModelParams& params, const CooccurrenceMatrix& x,
                                      const PriorEmbeddings* priors, const HyperParams& hp) {
  detail::check_shapes(params, x.dim(), priors);
  return gradients_vectorized(params, DenseCooccurrence::prepare(x, hp), priors, hp);
}

// Pair-at-a-time evaluation over the non-zero cells only.
inline Evaluation evaluate_reference_loop(const ModelParams& params, const CooccurrenceMatrix& x,
                                          const PriorEmbeddings* priors, const HyperParams& hp) {
  detail::check_shapes(params, x.dim(), priors);
  const std::size_t dim = params.dim();
  Evaluation out;
  out.grads = Gradients::zeros(params.vocab_size(), dim);
  const double* w = params.W.data();
  const double* wt = params.W_tilde.data();
  double* dw = out.grads.W.data();
  double* dwt = out.grads.W_tilde.data();

  x.for_each_cell([&](std::size_t i, std::size_t j, double count) {
    const double* wi = w + i * dim;
    const double* wtj = wt + j * dim;
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += wi[k] * wtj[k];
    const double diff = dot + params.b[static_cast<Eigen::Index>(i)] + params.b_tilde[static_cast<Eigen::Index>(j)] -
                        std::log(count);
    const double fx = weight_f(count, hp.alpha, hp.x_max);
    out.cost += fx * diff * diff;
    const double e = 2.0 * fx * diff;
    double* dwi = dw + i * dim;
    double* dwtj = dwt + j * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      dwi[k] += e * wtj[k];
      dwtj[k] += e * wi[k];
    }
    out.grads.b[static_cast<Eigen::Index>(i)] += e;
    out.grads.b_tilde[static_cast<Eigen::Index>(j)] += e;
  });

  if (detail::penalty_active(priors, hp)) {
    for (std::size_t k = 0; k < priors->size(); ++k) {
      const std::size_t i = priors->ids[k];
      const double* r = priors->vectors.data() + k * dim;
      for (std::size_t c = 0; c < dim; ++c) {
        const double delta = w[i * dim + c] + wt[i * dim + c] - r[c];
        out.cost += hp.mu * delta * delta;
        dw[i * dim + c] += 2.0 * hp.mu * delta;
        dwt[i * dim + c] += 2.0 * hp.mu * delta;
      }
    }
  }
  return out;
}

inline double cost_reference_loop(const ModelParams& params, const CooccurrenceMatrix& x,
                                  const PriorEmbeddings* priors, const HyperParams& hp) {
  return evaluate_reference_loop(params, x, priors, hp).cost;
}

inline Gradients gradients_reference_loop(const ModelParams& params, const CooccurrenceMatrix& x,
                                          const PriorEmbeddings* priors, const HyperParams& hp) {
  return evaluate_reference_loop(params, x, priors, hp).grads;
}

}  // namespace warmglove
