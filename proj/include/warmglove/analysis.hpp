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

// Faithfulness diagnostics on simulated data: how well trained scores track
// log co-occurrence counts, and how far embeddings drift from their priors,
// as the retrofitting weight mu varies.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "warmglove/common.hpp"
#include "warmglove/cooccur.hpp"
#include "warmglove/objective.hpp"
#include "warmglove/trainer.hpp"

namespace warmglove {

struct SimulationSpec {
  std::size_t vocab_size = 500;
  double density = 0.10;
  double prior_fraction = 0.5;
  std::vector<double> mu_grid{0.0, 0.001, 0.01, 0.1, 1.0, 10.0};
  std::size_t trials = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (vocab_size < 1) throw Error("simulated vocabulary must contain at least one word");
    if (!(density > 0.0 && density <= 1.0)) throw Error("density must lie in (0, 1]");
    if (!(prior_fraction >= 0.0 && prior_fraction <= 1.0)) throw Error("prior fraction must lie in [0, 1]");
    if (trials < 1) throw Error("at least one trial is required");
    if (mu_grid.empty()) throw Error("mu grid must not be empty");
    if (!std::is_sorted(mu_grid.begin(), mu_grid.end())) throw Error("mu grid must be sorted ascending");
    if (mu_grid.front() < 0.0) throw Error("mu values must be non-negative");
  }
};

// Each upper-triangle cell (diagonal included) is non-zero with probability
// `density`; non-zero values are exp(N(1, 1)).
inline CooccurrenceMatrix simulate_count_matrix(std::size_t vocab_size, double density, std::uint64_t seed) {
  if (vocab_size < 1) throw Error("simulated vocabulary must contain at least one word");
  if (!(density > 0.0 && density <= 1.0)) throw Error("density must lie in (0, 1]");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> log_count(1.0, 1.0);
  std::vector<CooccurrenceEntry> upper;
  upper.reserve(static_cast<std::size_t>(density * static_cast<double>(vocab_size) * (vocab_size + 1) / 2 * 1.05) + 16);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    for (std::size_t j = i; j < vocab_size; ++j) {
      if (detail::uniform01(engine) < density) upper.push_back({i, j, std::exp(log_count(engine))});
    }
  }
  return CooccurrenceMatrix(vocab_size, std::move(upper));
}

inline CooccurrenceMatrix simulate_count_matrix(const SimulationSpec& spec, std::size_t trial = 0) {
  spec.validate();
  return simulate_count_matrix(spec.vocab_size, spec.density, detail::derive_seed(spec.seed, trial, 0xC0));
}

// Random priors for round(fraction * |V|) words. Coordinate c is drawn from
// N(0, s_c), where s_c is the sample standard deviation of column c of
// `reference` (typically embeddings from a plain GloVe run).
inline PriorEmbeddings simulate_priors(const Matrix& reference, double fraction, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(reference.rows());
  const auto dim = reference.cols();
  std::mt19937_64 engine(seed);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), engine);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  PriorEmbeddings priors;
  priors.ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, n)));
  std::sort(priors.ids.begin(), priors.ids.end());

  Eigen::RowVectorXd stddev = Eigen::RowVectorXd::Zero(dim);
  if (n > 1) {
    const Eigen::RowVectorXd mean = reference.colwise().mean();
    stddev = ((reference.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt();
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  priors.vectors.resize(static_cast<Eigen::Index>(priors.ids.size()), dim);
  for (Eigen::Index k = 0; k < priors.vectors.rows(); ++k) {
    for (Eigen::Index c = 0; c < dim; ++c) priors.vectors(k, c) = stddev[c] * normal(engine);
  }
  return priors;
}

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("correlation inputs differ in length");
  if (a.size() < 2) throw Error("correlation needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - mean_a;
    const double db = b[k] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) throw Error("correlation is undefined for zero variance");
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

enum class CorrelationMode {
  // w_i . wt_j + b_i + bt_j, the quantity the objective regresses on log X.
  ModelScore,
  // (w_i + wt_i) . (w_j + wt_j)
  EmbeddingDot,
};

// Pearson correlation between model scores and log X over non-zero cells.
inline double correlation_score_vs_logcount(const ModelParams& params, const CooccurrenceMatrix& x,
                                            CorrelationMode mode = CorrelationMode::ModelScore) {
  params.check_consistent();
  if (x.dim() != params.vocab_size()) throw ShapeError("matrix and model disagree on vocabulary size");
  const Matrix composed = mode == CorrelationMode::EmbeddingDot ? compose_embeddings(params) : Matrix();
  std::vector<double> scores;
  std::vector<double> logs;
  scores.reserve(x.nonzero_cells());
  logs.reserve(x.nonzero_cells());
  x.for_each_cell([&](std::size_t i, std::size_t j, double value) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    if (mode == CorrelationMode::ModelScore) {
      scores.push_back(params.W.row(r).dot(params.W_tilde.row(c)) + params.b[r] + params.b_tilde[c]);
    } else {
      scores.push_back(composed.row(r).dot(composed.row(c)));
    }
    logs.push_back(std::log(value));
  });
  return pearson_correlation(scores, logs);
}

struct DistanceStats {
  // Mean |w_i + wt_i - r_i| over R; absent when R is empty.
  std::optional<double> mean_with_prior;
  // Mean distance from the initial embedding over words outside R; absent
  // without a snapshot or when every word has a prior.
  std::optional<double> mean_without_prior;
};

inline DistanceStats distance_to_priors(const ModelParams& params, const PriorEmbeddings& priors,
                                        const Matrix* initial_embeddings = nullptr) {
  params.check_consistent();
  priors.validate(params.vocab_size(), params.dim());
  const Matrix composed = compose_embeddings(params);
  DistanceStats stats;

  if (!priors.empty()) {
    double sum = 0.0;
    for (std::size_t k = 0; k < priors.size(); ++k) {
      sum += (composed.row(static_cast<Eigen::Index>(priors.ids[k])) -
              priors.vectors.row(static_cast<Eigen::Index>(k)))
                 .norm();
    }
    stats.mean_with_prior = sum / static_cast<double>(priors.size());
  }

  if (initial_embeddings != nullptr) {
    if (initial_embeddings->rows() != composed.rows() || initial_embeddings->cols() != composed.cols()) {
      throw ShapeError("initial embedding snapshot has the wrong shape");
    }
    std::vector<bool> anchored(params.vocab_size(), false);
    for (auto id : priors.ids) anchored[id] = true;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < anchored.size(); ++i) {
      if (anchored[i]) continue;
      const auto r = static_cast<Eigen::Index>(i);
      sum += (composed.row(r) - initial_embeddings->row(r)).norm();
      ++count;
    }
    if (count > 0) stats.mean_without_prior = sum / static_cast<double>(count);
  }
  return stats;
}

struct SweepRow {
  std::size_t trial = 0;
  double mu = 0.0;
  double correlation = 0.0;
  std::optional<double> dist_with_prior;
  std::optional<double> dist_without_prior;
};

struct SweepResult {
  // Trial-major, mu-minor.
  std::vector<SweepRow> rows;
};

using SweepProgress = std::function<void(const SweepRow&)>;

// For each trial: simulate a count matrix, train plain GloVe (mu = 0) to set
// the scale of simulated priors for a fraction of the words, then train at
// every mu in the grid from the same initialization seed. The mu = 0 row is
// the plain GloVe run itself.
inline SweepResult run_mu_sweep(const SimulationSpec& spec, const HyperParams& hp,
                                CorrelationMode mode = CorrelationMode::ModelScore,
                                const SweepProgress& progress = {}) {
  spec.validate();
  hp.validate();
  SweepResult result;
  result.rows.reserve(spec.trials * spec.mu_grid.size());

  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    const CooccurrenceMatrix x = simulate_count_matrix(spec, trial);
    HyperParams trial_hp = hp;
    trial_hp.seed = detail::derive_seed(hp.seed, trial, 0x1A);

    const auto run = [&](double mu, const PriorEmbeddings* priors, const DenseCooccurrence& dense) {
      HyperParams run_hp = trial_hp;
      run_hp.mu = mu;
      const PriorEmbeddings* active = active_priors(priors, run_hp);
      ModelParams initial = init_params(spec.vocab_size, run_hp, active);
      Matrix snapshot = compose_embeddings(initial);
      TrainResult trained = train_from(std::move(initial), dense, run_hp, active);
      return std::pair{std::move(trained.params), std::move(snapshot)};
    };

    const DenseCooccurrence dense = DenseCooccurrence::prepare(x, trial_hp);
    auto [baseline, baseline_start] = run(0.0, nullptr, dense);
    const PriorEmbeddings priors =
        simulate_priors(compose_embeddings(baseline), spec.prior_fraction, detail::derive_seed(spec.seed, trial, 0x9F));

    for (double mu : spec.mu_grid) {
      SweepRow row{trial, mu, 0.0, std::nullopt, std::nullopt};
      const auto record = [&](const ModelParams& params, const Matrix& start) {
        row.correlation = correlation_score_vs_logcount(params, x, mode);
        const DistanceStats d = distance_to_priors(params, priors, &start);
        row.dist_with_prior = d.mean_with_prior;
        row.dist_without_prior = d.mean_without_prior;
      };
      if (mu == 0.0) {
        record(baseline, baseline_start);
      } else {
        const auto [params, start] = run(mu, &priors, dense);
        record(params, start);
      }
      if (progress) progress(row);
      result.rows.push_back(row);
    }
  }
  return result;
}

inline void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  const auto field = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return std::string(buf);
  };
  out << "trial,mu,correlation,dist_with_prior,dist_without_prior\n";
  for (const auto& r : sweep.rows) {
    out << r.trial << ',' << field(r.mu) << ',' << field(r.correlation) << ',' << field(r.dist_with_prior) << ','
        << field(r.dist_without_prior) << '\n';
  }
}

inline void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_sweep_csv(sweep, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

// True when `values` never increases, except for at most `max_inversions`
// rises each no larger than `max_relative` of the preceding value.
inline bool nonincreasing_within(std::span<const double> values, std::size_t max_inversions = 1,
                                 double max_relative = 0.05) {
  std::size_t inversions = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double rise = values[k] - values[k - 1];
    if (rise <= 0.0) continue;
    if (rise > max_relative * std::abs(values[k - 1])) return false;
    if (++inversions > max_inversions) return false;
  }
  return true;
}

}  // namespace warmglove
