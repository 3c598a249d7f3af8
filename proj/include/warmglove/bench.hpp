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

// Seconds per training iteration for the dense vectorized objective and the
// pair-at-a-time loop on simulated count matrices. Only the gradient
// evaluation plus the AdaGrad update is timed; matrix simulation, dense
// preparation and parameter initialization happen outside the clock, and the
// first iteration of every run is a discarded warm-up.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "warmglove/analysis.hpp"
#include "warmglove/common.hpp"
#include "warmglove/objective.hpp"
#include "warmglove/trainer.hpp"

namespace warmglove {

struct BenchSpec {
  std::vector<std::size_t> vocab_sizes{5000, 10000, 20000};
  double density = 0.10;
  std::size_t iterations = 10;
  std::size_t corpora = 5;
  std::uint64_t seed = 0;
  std::size_t dim = 50;
  // Adds an arm whose timed region is empty, to measure the timer floor.
  bool include_noop = false;

  void validate() const {
    if (vocab_sizes.empty()) throw Error("at least one vocabulary size is required");
    for (auto n : vocab_sizes) {
      if (n < 1) throw Error("vocabulary sizes must be positive");
    }
    if (!(density > 0.0 && density <= 1.0)) throw Error("density must lie in (0, 1]");
    if (iterations < 1) throw Error("iterations must be at least 1");
    if (corpora < 1) throw Error("corpora must be at least 1");
    if (dim < 1) throw Error("dim must be positive");
  }
};

struct BenchRow {
  std::string implementation;
  std::size_t vocab_size = 0;
  double mean_s = 0.0;
  // Sample standard deviation; 0 for a single sample.
  double stddev_s = 0.0;
  std::size_t samples = 0;
};

class BenchMemoryError : public Error {
 public:
  BenchMemoryError(std::size_t vocab_size, std::size_t needed, std::size_t available)
      : Error("vocabulary size " + std::to_string(vocab_size) + " needs about " + gigabytes(needed) +
              " GB for dense matrices but only " + gigabytes(available) + " GB is available"),
        vocab_size_(vocab_size) {}

  std::size_t vocab_size() const { return vocab_size_; }

 private:
  static std::string gigabytes(std::size_t bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(bytes) / 1e9);
    return buf;
  }

  std::size_t vocab_size_;
};

// f(X), g(X) and the residual workspace, plus headroom for the sparse matrix
// and its simulation.
inline std::size_t dense_bytes_required(std::size_t vocab_size, double density = 0.10) {
  const double cells = static_cast<double>(vocab_size) * static_cast<double>(vocab_size);
  return static_cast<std::size_t>(3.0 * cells * sizeof(double) + 0.6 * density * cells * sizeof(CooccurrenceEntry));
}

inline std::optional<std::size_t> available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::size_t value = 0;
  std::string unit;
  while (in >> key >> value) {
    std::getline(in, unit);
    if (key == "MemAvailable:") return value * 1024;
  }
  return std::nullopt;
}

inline bool fits_in_memory(std::size_t vocab_size, double density = 0.10) {
  const auto available = available_memory_bytes();
  return !available || dense_bytes_required(vocab_size, density) <= *available;
}

inline void check_memory(std::size_t vocab_size, double density = 0.10) {
  const auto available = available_memory_bytes();
  const std::size_t needed = dense_bytes_required(vocab_size, density);
  if (available && needed > *available) throw BenchMemoryError(vocab_size, needed, *available);
}

struct HardwareInfo {
  std::string cpu_model;
  unsigned cores = 0;
  int threads = 1;
};

inline HardwareInfo hardware_info() {
  HardwareInfo info;
  info.cores = std::thread::hardware_concurrency();
  info.threads = Eigen::nbThreads();
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) info.cpu_model = line.substr(line.find_first_not_of(" \t", colon + 1));
      break;
    }
  }
  if (info.cpu_model.empty()) info.cpu_model = "unknown";
  return info;
}

namespace detail {

inline BenchRow summarize(std::string name, std::size_t vocab_size, const std::vector<double>& samples) {
  BenchRow row{std::move(name), vocab_size, 0.0, 0.0, samples.size()};
  for (double s : samples) row.mean_s += s;
  row.mean_s /= static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - row.mean_s) * (s - row.mean_s);
    row.stddev_s = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return row;
}

// Runs `step` once untimed, then `iterations` times under the clock.
template <class Step>
void time_iterations(std::size_t iterations, Step&& step, std::vector<double>& samples) {
  step();
  for (std::size_t it = 0; it < iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    step();
    samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
}

}  // namespace detail

using BenchProgress = std::function<void(const BenchRow&)>;

// Rows come out size-major in the order loop, vectorized[, noop].
inline std::vector<BenchRow> run_bench(const BenchSpec& spec, const BenchProgress& progress = {}) {
  spec.validate();
  for (auto n : spec.vocab_sizes) check_memory(n, spec.density);

  HyperParams hp;
  hp.dim = spec.dim;
  std::vector<BenchRow> rows;
  for (std::size_t n : spec.vocab_sizes) {
    std::vector<double> loop_samples;
    std::vector<double> vectorized_samples;
    std::vector<double> noop_samples;
    for (std::size_t corpus = 0; corpus < spec.corpora; ++corpus) {
      const CooccurrenceMatrix x = simulate_count_matrix(n, spec.density, detail::derive_seed(spec.seed, n, corpus));
      hp.seed = detail::derive_seed(spec.seed, n, corpus + 0x5EED);

      {
        ModelParams params = init_params(n, hp);
        AdagradState state = AdagradState::like(params);
        detail::time_iterations(spec.iterations, [&] {
          const Evaluation eval = evaluate_reference_loop(params, x, nullptr, hp);
          adagrad_step(params, state, eval.grads, hp.learning_rate);
        }, loop_samples);
      }
      {
        const DenseCooccurrence dense = DenseCooccurrence::prepare(x, hp);
        ModelParams params = init_params(n, hp);
        AdagradState state = AdagradState::like(params);
        Matrix workspace;
        detail::time_iterations(spec.iterations, [&] {
          const Evaluation eval = evaluate_vectorized(params, dense, nullptr, hp, workspace);
          adagrad_step(params, state, eval.grads, hp.learning_rate);
        }, vectorized_samples);
      }
      if (spec.include_noop) {
        detail::time_iterations(spec.iterations, [] { std::atomic_signal_fence(std::memory_order_seq_cst); },
                                noop_samples);
      }
    }
    rows.push_back(detail::summarize("loop", n, loop_samples));
    if (progress) progress(rows.back());
    rows.push_back(detail::summarize("vectorized", n, vectorized_samples));
    if (progress) progress(rows.back());
    if (spec.include_noop) {
      rows.push_back(detail::summarize("noop", n, noop_samples));
      if (progress) progress(rows.back());
    }
  }
  return rows;
}

inline std::string implementation_label(const std::string& name) {
  if (name == "loop") return "Non-vectorized (pair loop)";
  if (name == "vectorized") return "Vectorized";
  if (name == "noop") return "No-op (timer floor)";
  return name;
}

// Implementations as rows, vocabulary sizes as columns, seconds per
// iteration in the cells.
inline std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::vector<std::size_t> sizes;
  std::vector<std::string> names;
  std::map<std::pair<std::string, std::size_t>, double> cells;
  for (const auto& r : rows) {
    if (std::find(sizes.begin(), sizes.end(), r.vocab_size) == sizes.end()) sizes.push_back(r.vocab_size);
    if (std::find(names.begin(), names.end(), r.implementation) == names.end()) names.push_back(r.implementation);
    cells[{r.implementation, r.vocab_size}] = r.mean_s;
  }
  const auto size_label = [](std::size_t n) {
    return n >= 1000 && n % 1000 == 0 ? std::to_string(n / 1000) + "K" : std::to_string(n);
  };
  std::size_t label_width = std::string("Implementation").size();
  for (const auto& name : names) label_width = std::max(label_width, implementation_label(name).size());
  constexpr int kCell = 12;

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), "Implementation");
  out << buf;
  for (auto n : sizes) {
    std::snprintf(buf, sizeof buf, "%*s", kCell, size_label(n).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& name : names) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(label_width), implementation_label(name).c_str());
    out << buf;
    for (auto n : sizes) {
      const auto it = cells.find({name, n});
      if (it == cells.end()) {
        std::snprintf(buf, sizeof buf, "%*s", kCell, "-");
      } else {
        std::snprintf(buf, sizeof buf, "%*.4f", kCell, it->second);
      }
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// CSV to `path` (hardware metadata as leading `#` comment lines) and the
// aligned table to `path` + ".txt".
inline void emit_bench_table(const std::vector<BenchRow>& rows, const std::string& path) {
  if (rows.empty()) throw Error("no benchmark results to write");
  const HardwareInfo hw = hardware_info();
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "# cpu: " << hw.cpu_model << "\n# cores: " << hw.cores << "\n# threads: " << hw.threads << '\n';
    out << "implementation,vocab_size,mean_s,stddev_s\n";
    char buf[64];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g", r.mean_s, r.stddev_s);
      out << r.implementation << ',' << r.vocab_size << ',' << buf << '\n';
    }
    if (!out) throw Error("write to '" + path + "' failed");
  }
  std::ofstream table(path + ".txt");
  if (!table) throw Error("cannot open '" + path + ".txt' for writing");
  table << format_bench_table(rows);
}

}  // namespace warmglove
