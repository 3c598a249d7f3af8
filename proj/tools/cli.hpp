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

// The `warmglove` command line: cooccur, train, simulate, bench, featurize.
//
// Exit status is 0 on success, 1 for usage errors (reported before any
// computation starts) and 2 for runtime failures such as I/O errors or
// training divergence.

#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "warmglove/warmglove.hpp"

namespace warmglove::cli {

// Bad flag values or combinations; maps to exit status 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CooccurOptions {
  std::vector<std::string> corpora;
  std::size_t window = 10;
  std::size_t min_count = 300;
  std::string out;
  std::string vocab_out;
  std::string emoticons = default_emoticon_path();
};

struct TrainOptions {
  std::string cooc;
  std::string vocab;
  std::string priors;
  std::string out;
  std::string report;
  std::size_t log_every = 1000;
  HyperParams hp;
};

struct SimulateOptions {
  SimulationSpec spec;
  HyperParams hp;
  bool full = false;
  std::string correlation_mode = "score";
  std::string out;
};

struct BenchOptions {
  BenchSpec spec;
  bool skip_oversized = false;
  std::string out;
};

struct FeaturizeOptions {
  std::string embeddings;
  std::string in;
  std::string out;
  std::string emoticons = default_emoticon_path();
};

namespace detail {

inline void run_cooccur(const CooccurOptions& opt, std::ostream& err) {
  TokenizerConfig cfg;
  if (!opt.emoticons.empty()) cfg.emoticons = load_emoticon_lexicon(opt.emoticons);

  // One document per non-empty line.
  std::vector<Tokens> docs;
  for (const auto& path : opt.corpora) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      Tokens doc = tokenize(line, cfg);
      if (!doc.empty()) docs.push_back(std::move(doc));
    }
  }
  const Vocabulary vocab = build_vocabulary(std::span<const Tokens>(docs), opt.min_count);
  const CooccurrenceMatrix x = build_cooccurrence(docs, vocab, opt.window);
  write_cooccurrence(x, opt.out);
  write_vocabulary(vocab, opt.vocab_out.empty() ? opt.out + ".vocab" : opt.vocab_out);
  const MatrixStats stats = matrix_stats(x);
  err << "documents " << docs.size() << ", vocabulary " << vocab.size() << ", stored entries " << x.entries().size()
      << ", non-zero fraction " << stats.nonzero_fraction << ", total mass " << stats.total_mass << '\n';
}

inline bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

inline void run_train(const TrainOptions& opt, std::ostream& err) {
  const CooccurrenceMatrix x = read_cooccurrence(opt.cooc);

  const std::string vocab_path = opt.vocab.empty() ? opt.cooc + ".vocab" : opt.vocab;
  std::optional<Vocabulary> vocab;
  if (!opt.vocab.empty() || file_exists(vocab_path)) {
    vocab = read_vocabulary(vocab_path);
    if (vocab->size() != x.dim()) {
      throw Error("vocabulary '" + vocab_path + "' has " + std::to_string(vocab->size()) +
                  " words but the matrix has dimension " + std::to_string(x.dim()));
    }
  }

  std::optional<PriorEmbeddings> priors;
  if (!opt.priors.empty()) {
    if (!vocab) throw Error("--priors needs a vocabulary file; none found at '" + vocab_path + "'");
    priors = resolve_priors(read_embeddings(opt.priors), *vocab, opt.hp.dim);
    err << "priors cover " << priors->size() << " of " << vocab->size() << " words\n";
  }

  const std::size_t every = opt.log_every;
  const TrainResult result = train(x, opt.hp, priors ? &*priors : nullptr,
                                   [&](std::size_t epoch, double cost, double) {
                                     if (every > 0 && (epoch % every == 0 || epoch + 1 == opt.hp.epochs)) {
                                       err << "epoch " << epoch << " cost " << cost << '\n';
                                     }
                                   });

  const Matrix embeddings = compose_embeddings(result.params);
  if (vocab) {
    write_embeddings(to_records(embeddings, *vocab), opt.out);
  } else {
    std::vector<EmbeddingRecord> records;
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
      const auto row = embeddings.row(i);
      records.push_back({std::to_string(i), std::vector<double>(row.begin(), row.end())});
    }
    write_embeddings(records, opt.out);
  }

  if (!opt.report.empty()) {
    std::ofstream out(opt.report);
    if (!out) throw Error("cannot open '" + opt.report + "' for writing");
    out << "epoch,cost,seconds\n";
    char buf[64];
    for (std::size_t t = 0; t < result.report.epochs; ++t) {
      std::snprintf(buf, sizeof buf, "%.17g,%.9g", result.report.costs[t], result.report.seconds[t]);
      out << t << ',' << buf << '\n';
    }
    if (!out) throw Error("write to '" + opt.report + "' failed");
  }
}

inline void run_simulate(SimulateOptions opt, std::ostream& err) {
  if (opt.full) opt.hp.epochs = 50000;
  const CorrelationMode mode = opt.correlation_mode == "dot" ? CorrelationMode::EmbeddingDot
                                                              : CorrelationMode::ModelScore;
  const SweepResult sweep = run_mu_sweep(opt.spec, opt.hp, mode, [&](const SweepRow& row) {
    err << "trial " << row.trial << " mu " << row.mu << " correlation " << row.correlation << '\n';
  });
  write_sweep_csv(sweep, opt.out);
}

inline void run_bench_command(BenchOptions opt, std::ostream& out, std::ostream& err) {
  if (opt.skip_oversized) {
    std::vector<std::size_t> kept;
    for (auto n : opt.spec.vocab_sizes) {
      if (fits_in_memory(n, opt.spec.density)) {
        kept.push_back(n);
      } else {
        err << "skipping vocabulary size " << n << ": not enough memory for dense matrices\n";
      }
    }
    if (kept.empty()) throw Error("no vocabulary size fits in memory");
    opt.spec.vocab_sizes = kept;
  }
  const auto rows = run_bench(opt.spec, [&](const BenchRow& r) {
    err << r.implementation << " " << r.vocab_size << ": " << r.mean_s << " s/iteration\n";
  });
  emit_bench_table(rows, opt.out);
  out << format_bench_table(rows);
}

inline void run_featurize(const FeaturizeOptions& opt) {
  const EmbeddingFile embeddings = read_embeddings(opt.embeddings);
  TokenizerConfig cfg;
  if (!opt.emoticons.empty()) cfg.emoticons = load_emoticon_lexicon(opt.emoticons);
  std::ifstream in(opt.in);
  if (!in) throw Error("cannot open documents '" + opt.in + "'");
  std::ofstream out(opt.out);
  if (!out) throw Error("cannot open '" + opt.out + "' for writing");
  std::string line;
  char buf[32];
  while (std::getline(in, line)) {
    const DocumentVector doc = sum_features(tokenize(line, cfg), embeddings);
    for (std::size_t k = 0; k < doc.vector.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.6g", doc.vector[k]);
      out << (k > 0 ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write to '" + opt.out + "' failed");
}

// Adds `--key value` for every config entry whose flag is absent from the
// command line, so explicit flags take precedence.
inline std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      config_path = args[k + 1];
    } else if (args[k].rfind("--config=", 0) == 0) {
      config_path = args[k].substr(9);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw Error("cannot open config file '" + config_path + "'");
  const auto items = CLI::ConfigINI().from_config(in);
  for (const auto& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    const std::string flag = "--" + item.name;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    for (const auto& v : item.inputs) args.push_back(v);
  }
  return args;
}

template <class T>
CLI::Option* add_list(CLI::App* app, const std::string& name, std::vector<T>& values, const std::string& help) {
  return app->add_option(name, values, help)->delimiter(',')->expected(1, -1);
}

}  // namespace detail

inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                              std::ostream& err = std::cerr) {
  CLI::App app{"GloVe and retrofitted (warm-start) GloVe embeddings", "warmglove"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string config;
  app.add_option("--threads", threads, "Cap on internal threads (0: all cores)");
  app.add_option("--config", config, "Plain-text `key = value` file of flag defaults; flags win");

  CooccurOptions cooccur_opt;
  auto* cooccur = app.add_subcommand("cooccur", "Tokenize corpora and build the co-occurrence matrix");
  cooccur->add_option("corpus", cooccur_opt.corpora, "Corpus files, one document per line")->required();
  cooccur->add_option("--window", cooccur_opt.window, "Words to the left and right that co-occur");
  cooccur->add_option("--min-count", cooccur_opt.min_count, "Minimum token count to enter the vocabulary");
  cooccur->add_option("--out", cooccur_opt.out, "Matrix file to write")->required();
  cooccur->add_option("--vocab-out", cooccur_opt.vocab_out, "Vocabulary file (default: <out>.vocab)");
  cooccur->add_option("--emoticons", cooccur_opt.emoticons, "Emoticon lexicon, one per line (empty: none)");

  TrainOptions train_opt;
  train_opt.hp.epochs = 50000;
  auto* train_cmd = app.add_subcommand("train", "Train GloVe, or retrofitted GloVe when --priors is given");
  train_cmd->add_option("--cooc", train_opt.cooc, "Co-occurrence matrix file")->required();
  train_cmd->add_option("--vocab", train_opt.vocab, "Vocabulary file (default: <cooc>.vocab)");
  train_cmd->add_option("--dim", train_opt.hp.dim, "Embedding dimension");
  train_cmd->add_option("--alpha", train_opt.hp.alpha, "Weighting exponent");
  train_cmd->add_option("--x-max", train_opt.hp.x_max, "Weighting cutoff");
  train_cmd->add_option("--lr", train_opt.hp.learning_rate, "AdaGrad learning rate");
  train_cmd->add_option("--epochs", train_opt.hp.epochs, "Full-batch epochs");
  train_cmd->add_option("--mu", train_opt.hp.mu, "Weight of the distance-to-prior penalty");
  train_cmd->add_option("--g-fill", train_opt.hp.g_fill, "Constant standing in for log 0");
  train_cmd->add_option("--priors", train_opt.priors, "Prior embeddings in GloVe text format");
  train_cmd->add_flag("--init-at-priors", train_opt.hp.init_at_priors, "Start anchored words at their priors");
  train_cmd->add_option("--seed", train_opt.hp.seed, "Random seed");
  train_cmd->add_option("--out", train_opt.out, "Embeddings file to write (w + w~ per word)")->required();
  train_cmd->add_option("--report", train_opt.report, "CSV of epoch,cost,seconds");
  train_cmd->add_option("--log-every", train_opt.log_every, "Print the cost every N epochs (0: never)");

  SimulateOptions sim_opt;
  sim_opt.hp.epochs = 2000;
  auto* simulate = app.add_subcommand("simulate", "Sweep mu on simulated count matrices");
  simulate->add_option("--size", sim_opt.spec.vocab_size, "Simulated vocabulary size");
  simulate->add_option("--density", sim_opt.spec.density, "Target non-zero fraction");
  simulate->add_option("--prior-frac", sim_opt.spec.prior_fraction, "Fraction of words given priors");
  simulate->add_option("--trials", sim_opt.spec.trials, "Independent trials");
  detail::add_list(simulate, "--mu-grid", sim_opt.spec.mu_grid, "Ascending mu values");
  simulate->add_option("--epochs", sim_opt.hp.epochs, "Epochs per training run");
  simulate->add_flag("--full", sim_opt.full, "Train for 50000 epochs per run");
  simulate->add_option("--dim", sim_opt.hp.dim, "Embedding dimension");
  simulate->add_option("--alpha", sim_opt.hp.alpha, "Weighting exponent");
  simulate->add_option("--x-max", sim_opt.hp.x_max, "Weighting cutoff");
  simulate->add_option("--lr", sim_opt.hp.learning_rate, "AdaGrad learning rate");
  simulate->add_option("--seed", sim_opt.spec.seed, "Random seed");
  simulate->add_option("--correlation-mode", sim_opt.correlation_mode, "score (w.w~ + biases) or dot (w^ . w^)")
      ->check(CLI::IsMember({"score", "dot"}));
  simulate->add_option("--out", sim_opt.out, "Sweep CSV to write")->required();

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "Time vectorized and pair-loop training iterations");
  detail::add_list(bench, "--sizes", bench_opt.spec.vocab_sizes, "Vocabulary sizes");
  bench->add_option("--density", bench_opt.spec.density, "Non-zero fraction of simulated matrices");
  bench->add_option("--iters", bench_opt.spec.iterations, "Timed iterations per corpus");
  bench->add_option("--corpora", bench_opt.spec.corpora, "Simulated corpora per size");
  bench->add_option("--dim", bench_opt.spec.dim, "Embedding dimension");
  bench->add_option("--seed", bench_opt.spec.seed, "Random seed");
  bench->add_flag("--noop", bench_opt.spec.include_noop, "Also time an empty step");
  bench->add_flag("--skip-oversized", bench_opt.skip_oversized, "Drop sizes that do not fit in memory");
  bench->add_option("--out", bench_opt.out, "CSV to write; the table goes to <out>.txt")->required();

  FeaturizeOptions feat_opt;
  auto* featurize = app.add_subcommand("featurize", "Sum word vectors per document");
  featurize->add_option("--embeddings", feat_opt.embeddings, "Embeddings in GloVe text format")->required();
  featurize->add_option("--in", feat_opt.in, "Documents, one per line")->required();
  featurize->add_option("--out", feat_opt.out, "CSV of document vectors")->required();
  featurize->add_option("--emoticons", feat_opt.emoticons, "Emoticon lexicon, one per line (empty: none)");

  std::vector<std::string> args;
  try {
    args = detail::apply_config(std::vector<std::string>(argv + std::min(argc, 1), argv + argc));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
    if (threads < 0) throw UsageError("--threads must be non-negative");
    if (cooccur->parsed() && cooccur_opt.window < 1) throw UsageError("--window must be at least 1");
    if (cooccur->parsed() && cooccur_opt.min_count < 1) throw UsageError("--min-count must be at least 1");
    if (train_cmd->parsed()) train_opt.hp.validate();
    if (simulate->parsed()) {
      sim_opt.spec.validate();
      sim_opt.hp.validate();
    }
    if (bench->parsed()) bench_opt.spec.validate();
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (threads > 0) Eigen::setNbThreads(threads);

  try {
    if (cooccur->parsed()) detail::run_cooccur(cooccur_opt, err);
    if (train_cmd->parsed()) detail::run_train(train_opt, err);
    if (simulate->parsed()) detail::run_simulate(sim_opt, err);
    if (bench->parsed()) detail::run_bench_command(bench_opt, out, err);
    if (featurize->parsed()) detail::run_featurize(feat_opt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace warmglove::cli
