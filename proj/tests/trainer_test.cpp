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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "warmglove/trainer.hpp"

namespace warmglove {
namespace {

// 0.05 / sqrt(2) and 0.05 / sqrt(2) + 0.05 / sqrt(3).
constexpr double kFirstStep = 0.035355339059327376;
constexpr double kTwoSteps = 0.06422285251880866;

HyperParams small_hp(std::size_t dim = 5, std::size_t epochs = 0, std::uint64_t seed = 1) {
  HyperParams hp;
  hp.dim = dim;
  hp.epochs = epochs;
  hp.seed = seed;
  return hp;
}

double sample_stddev(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TEST(InitParams, DeterministicForSeed) {
  const HyperParams hp = small_hp();
  EXPECT_EQ(init_params(40, hp), init_params(40, hp));
  HyperParams other = hp;
  other.seed = 2;
  EXPECT_FALSE(init_params(40, hp) == init_params(40, other));
}

TEST(InitParams, UniformRangeAndZeroBiases) {
  const HyperParams hp = small_hp(10);
  const ModelParams p = init_params(200, hp);
  EXPECT_EQ(p.b.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.b_tilde.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT(p.W.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT(p.W_tilde.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_GT(p.W.cwiseAbs().maxCoeff(), 0.04);
}

TEST(InitParams, RowsWithoutPriorsMatchPriorSpread) {
  std::mt19937_64 rng(5);
  const std::size_t n = 2000;
  const HyperParams hp = small_hp(20);
  const PriorEmbeddings priors = testing::random_priors(n, hp.dim, 0.5, rng, 0.7);

  std::vector<double> prior_values(priors.vectors.data(), priors.vectors.data() + priors.vectors.size());
  const double s = sample_stddev(prior_values);

  const ModelParams p = init_params(n, hp, &priors);
  std::vector<bool> anchored(n, false);
  for (auto id : priors.ids) anchored[id] = true;
  std::vector<double> oov;
  for (std::size_t i = 0; i < n; ++i) {
    if (anchored[i]) continue;
    for (std::size_t k = 0; k < hp.dim; ++k) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(k);
      oov.push_back(p.W(r, c) + p.W_tilde(r, c));
    }
  }
  EXPECT_NEAR(sample_stddev(oov), s, 0.1 * s);

  // Anchored rows keep the default draw.
  const ModelParams plain = init_params(n, hp);
  for (auto id : priors.ids) {
    const auto r = static_cast<Eigen::Index>(id);
    EXPECT_EQ(p.W.row(r), plain.W.row(r));
  }
}

TEST(InitParams, AtPriorsSplitsThePriorVector) {
  std::mt19937_64 rng(6);
  HyperParams hp = small_hp(4);
  hp.init_at_priors = true;
  const PriorEmbeddings priors = testing::random_priors(30, 4, 0.5, rng);
  const Matrix composed = compose_embeddings(init_params(30, hp, &priors));
  for (std::size_t k = 0; k < priors.size(); ++k) {
    const auto row = composed.row(static_cast<Eigen::Index>(priors.ids[k]));
    EXPECT_LT((row - priors.vectors.row(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(InitParams, Errors) {
  EXPECT_THROW(init_params(0, small_hp()), Error);
  PriorEmbeddings bad{{3}, Matrix::Zero(1, 5)};
  EXPECT_THROW(init_params(3, small_hp(), &bad), ShapeError);
}

ModelParams scalar_params(double value) {
  ModelParams p = ModelParams::zeros(1, 1);
  p.W(0, 0) = value;
  return p;
}

TEST(Adagrad, SingleStep) {
  ModelParams p = scalar_params(0.0);
  AdagradState state = AdagradState::like(p);
  Gradients g = Gradients::zeros(1, 1);
  g.W(0, 0) = 1.0;
  adagrad_step(p, state, g, 0.05);
  EXPECT_EQ(state.accum.W(0, 0), 2.0);
  EXPECT_NEAR(p.W(0, 0), -kFirstStep, 1e-15);
}

TEST(Adagrad, ZeroGradientChangesNothing) {
  ModelParams p = scalar_params(0.3);
  AdagradState state = AdagradState::like(p);
  adagrad_step(p, state, Gradients::zeros(1, 1), 0.05);
  EXPECT_EQ(p.W(0, 0), 0.3);
  EXPECT_EQ(state.accum.W(0, 0), 1.0);
  EXPECT_EQ(state.accum.b[0], 1.0);
}

TEST(Adagrad, TwoSteps) {
  ModelParams p = scalar_params(0.0);
  AdagradState state = AdagradState::like(p);
  Gradients g = Gradients::zeros(1, 1);
  g.W(0, 0) = 1.0;
  adagrad_step(p, state, g, 0.05);
  adagrad_step(p, state, g, 0.05);
  EXPECT_NEAR(p.W(0, 0), -kTwoSteps, 1e-15);
}

TEST(Adagrad, ShapeMismatch) {
  ModelParams p = ModelParams::zeros(2, 2);
  AdagradState state = AdagradState::like(p);
  EXPECT_THROW(adagrad_step(p, state, Gradients::zeros(3, 2), 0.05), ShapeError);
}

TEST(AdagradProperty, AccumulatorsNeverDecrease) {
  std::mt19937_64 rng(8);
  ModelParams p = testing::random_params(10, 3, rng);
  AdagradState state = AdagradState::like(p);
  for (int step = 0; step < 50; ++step) {
    const ParamBlocks before = state.accum;
    adagrad_step(p, state, testing::random_params(10, 3, rng), 0.05);
    EXPECT_TRUE((state.accum.W.array() >= before.W.array()).all());
    EXPECT_TRUE((state.accum.W_tilde.array() >= before.W_tilde.array()).all());
    EXPECT_TRUE((state.accum.b.array() >= before.b.array()).all());
    EXPECT_TRUE((state.accum.b_tilde.array() >= before.b_tilde.array()).all());
  }
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  std::mt19937_64 rng(9);
  const CooccurrenceMatrix x = testing::random_matrix(20, 0.3, rng);
  const HyperParams hp = small_hp(5, 0);
  const TrainResult result = train(x, hp);
  EXPECT_EQ(result.params, init_params(20, hp));
  EXPECT_TRUE(result.report.costs.empty());
  EXPECT_EQ(result.report.epochs, 0u);
}

TEST(Train, ReportHasOneCostPerEpoch) {
  std::mt19937_64 rng(10);
  const CooccurrenceMatrix x = testing::random_matrix(15, 0.3, rng);
  std::size_t calls = 0;
  const TrainResult result = train(x, small_hp(4, 25), nullptr, [&](std::size_t, double, double) { ++calls; });
  EXPECT_EQ(result.report.costs.size(), 25u);
  EXPECT_EQ(result.report.seconds.size(), 25u);
  EXPECT_EQ(calls, 25u);
}

TEST(Train, CostDecreasesOnRandomMatrices) {
  double before = 0.0;
  double after = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const CooccurrenceMatrix x = testing::random_matrix(50, 0.2, rng);
    const TrainResult result = train(x, small_hp(10, 201, seed));
    before += result.report.costs[0];
    after += result.report.costs[200];
    EXPECT_LT(result.report.costs[200], result.report.costs[0]) << "seed " << seed;
  }
  EXPECT_LT(after, before);
}

TEST(Train, DivergenceIsReported) {
  std::mt19937_64 rng(11);
  const CooccurrenceMatrix x = testing::random_matrix(10, 0.5, rng);
  HyperParams hp = small_hp(3, 5);
  ModelParams start = init_params(10, hp);
  start.W(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(train_from(start, DenseCooccurrence::prepare(x, hp), hp), DivergenceError);
}

TEST(TrainProperty, MuZeroReducesToGloveExactly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const CooccurrenceMatrix x = testing::random_matrix(25, 0.25, rng);
    const PriorEmbeddings priors = testing::random_priors(25, 6, 0.5, rng);
    HyperParams hp = small_hp(6, 50, seed);
    hp.mu = 0.0;
    const TrainResult with = train(x, hp, &priors);
    const TrainResult without = train(x, hp);
    EXPECT_EQ(with.params, without.params);
    EXPECT_EQ(with.report.costs, without.report.costs);
  }
}

TEST(TrainProperty, EmptyPriorSetReducesToGlove) {
  std::mt19937_64 rng(12);
  const CooccurrenceMatrix x = testing::random_matrix(20, 0.25, rng);
  const PriorEmbeddings none{{}, Matrix(0, 4)};
  const HyperParams hp = small_hp(4, 30);
  EXPECT_EQ(train(x, hp, &none).params, train(x, hp).params);
}

TEST(TrainProperty, Deterministic) {
  std::mt19937_64 rng(13);
  const CooccurrenceMatrix x = testing::random_matrix(30, 0.2, rng);
  const PriorEmbeddings priors = testing::random_priors(30, 5, 0.5, rng);
  const HyperParams hp = small_hp(5, 40);
  EXPECT_EQ(train(x, hp, &priors).params, train(x, hp, &priors).params);
}

double mean_distance_to_priors(const ModelParams& params, const PriorEmbeddings& priors) {
  const Matrix w = compose_embeddings(params);
  double total = 0.0;
  for (std::size_t k = 0; k < priors.size(); ++k) {
    total += (w.row(static_cast<Eigen::Index>(priors.ids[k])) - priors.vectors.row(static_cast<Eigen::Index>(k))).norm();
  }
  return total / static_cast<double>(priors.size());
}

TEST(TrainProperty, PenaltyPullsTowardPriors) {
  double anchored = 0.0;
  double free = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(200 + seed);
    const CooccurrenceMatrix x = testing::random_matrix(40, 0.2, rng);
    const PriorEmbeddings priors = testing::random_priors(40, 8, 0.5, rng);
    HyperParams hp = small_hp(8, 1000, seed);
    hp.mu = 1.0;
    anchored += mean_distance_to_priors(train(x, hp, &priors).params, priors);
    hp.mu = 0.0;
    free += mean_distance_to_priors(train(x, hp, &priors).params, priors);
  }
  EXPECT_LT(anchored, free);
}

TEST(Compose, Examples) {
  std::mt19937_64 rng(14);
  ModelParams p = testing::random_params(6, 3, rng);
  ModelParams zero_tilde = p;
  zero_tilde.W_tilde.setZero();
  EXPECT_EQ(compose_embeddings(zero_tilde), zero_tilde.W);

  ModelParams cancel = p;
  cancel.W_tilde = -cancel.W;
  EXPECT_EQ(compose_embeddings(cancel).cwiseAbs().maxCoeff(), 0.0);

  const Matrix out = compose_embeddings(p);
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_EQ(out(0, k), p.W(0, k) + p.W_tilde(0, k));
}

}  // namespace
}  // namespace warmglove
