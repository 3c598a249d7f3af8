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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace warmglove {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "warmglove");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("warmglove_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST_F(CliTest, TrainHelpShowsDefaults) {
  const Outcome r = run({"train", "--help"});
  EXPECT_EQ(r.status, 0);
  for (const char* needle : {"--dim", "50", "--alpha", "0.75", "--x-max", "100", "--lr", "0.05", "--mu", "0.1"}) {
    EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
  }
}

TEST_F(CliTest, CooccurHelpShowsWindow) {
  const Outcome r = run({"cooccur", "--help"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("--window"), std::string::npos);
  EXPECT_NE(r.out.find("10"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({"frobnicate"}).status, 1);
  EXPECT_EQ(run({}).status, 1);
  EXPECT_EQ(run({"train", "--cooc", "x"}).status, 1);
  EXPECT_EQ(run({"train", "--cooc", "x", "--out", "y", "--alpha", "2"}).status, 1);
  EXPECT_EQ(run({"train", "--cooc", "x", "--out", "y", "--dim", "abc"}).status, 1);
  EXPECT_EQ(run({"cooccur", "c.txt", "--out", "y", "--window", "0"}).status, 1);
  const Outcome r = run({"frobnicate"});
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MissingInputExitsTwo) {
  const Outcome r = run({"train", "--cooc", path("missing.file"), "--out", path("v.txt")});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("missing.file"), std::string::npos);
}

TEST_F(CliTest, DocumentedInvocationsParse) {
  // --help stops after flag conversion, so these check syntax and types
  // without running anything.
  const std::vector<std::vector<std::string>> examples{
      {"cooccur", "--window", "10", "--min-count", "5", "--out", "X.cooc", "a.txt", "b.txt"},
      {"train", "--cooc", "X.cooc", "--dim", "50", "--alpha", "0.75", "--x-max", "100", "--lr", "0.05", "--epochs",
       "100", "--mu", "0.1", "--priors", "glove.txt", "--init-at-priors", "--seed", "7", "--out", "vectors.txt",
       "--report", "report.csv"},
      {"simulate", "--size", "500", "--density", "0.10", "--prior-frac", "0.5", "--trials", "5", "--mu-grid",
       "0,0.001,0.01,0.1,1,10", "--epochs", "100", "--out", "sweep.csv"},
      {"bench", "--sizes", "5000,10000,20000", "--density", "0.10", "--iters", "10", "--corpora", "5", "--out",
       "bench.csv"},
      {"featurize", "--embeddings", "vectors.txt", "--in", "docs.txt", "--out", "features.csv"},
  };
  for (auto args : examples) {
    args.push_back("--help");
    const Outcome r = run(args);
    EXPECT_EQ(r.status, 0) << args[0] << ": " << r.err;
  }
}

TEST_F(CliTest, EndToEndPipeline) {
  const std::string corpus = write("corpus.txt",
                                   "the cat sat on the mat\n"
                                   "the dog sat on the log :)\n"
                                   "\n"
                                   "a cat and a dog!\n");
  const std::string cooc = path("x.cooc");
  ASSERT_EQ(run({"cooccur", corpus, "--min-count", "1", "--out", cooc}).status, 0);
  const CooccurrenceMatrix x = read_cooccurrence(cooc);
  const Vocabulary vocab = read_vocabulary(cooc + ".vocab");
  EXPECT_EQ(x.dim(), vocab.size());
  EXPECT_TRUE(vocab.contains(":)"));

  const std::string priors = write("priors.txt", "the 0.1 0.2 0.3\ncat -0.1 0.0 0.4\nunseen 1 1 1\n");
  const std::string vectors = path("vectors.txt");
  const std::string report = path("report.csv");
  const Outcome trained = run({"train", "--cooc", cooc, "--dim", "3", "--epochs", "20", "--priors", priors, "--out",
                           vectors, "--report", report, "--log-every", "0"});
  ASSERT_EQ(trained.status, 0) << trained.err;
  const EmbeddingFile emb = read_embeddings(vectors);
  EXPECT_EQ(emb.size(), vocab.size());
  EXPECT_EQ(emb.dim(), 3u);
  EXPECT_NE(emb.find("cat"), nullptr);
  const std::string csv = slurp(report);
  EXPECT_EQ(csv.rfind("epoch,cost,seconds\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);

  const std::string docs = write("docs.txt", "the cat\nzzz\n");
  const std::string features = path("features.csv");
  ASSERT_EQ(run({"featurize", "--embeddings", vectors, "--in", docs, "--out", features}).status, 0);
  const std::string f = slurp(features);
  EXPECT_EQ(std::count(f.begin(), f.end(), '\n'), 2);
  EXPECT_NE(f.find("0,0,0\n"), std::string::npos);
}

TEST_F(CliTest, PriorDimensionMismatchIsRuntimeError) {
  const std::string corpus = write("c.txt", "a b a b\n");
  const std::string cooc = path("x.cooc");
  ASSERT_EQ(run({"cooccur", corpus, "--min-count", "1", "--out", cooc}).status, 0);
  const std::string priors = write("p.txt", "a 1 2\n");
  EXPECT_EQ(run({"train", "--cooc", cooc, "--dim", "3", "--epochs", "1", "--priors", priors, "--out",
                 path("v.txt")})
                .status,
            2);
}

TEST_F(CliTest, SimulateAndBenchWriteTheirTables) {
  const std::string sweep = path("sweep.csv");
  ASSERT_EQ(run({"simulate", "--size", "15", "--density", "0.3", "--trials", "2", "--mu-grid", "0,1", "--epochs",
                 "5", "--dim", "3", "--out", sweep})
                .status,
            0);
  const std::string s = slurp(sweep);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);

  const std::string bench = path("bench.csv");
  const Outcome b = run({"bench", "--sizes", "10", "--iters", "1", "--corpora", "1", "--out", bench});
  ASSERT_EQ(b.status, 0) << b.err;
  EXPECT_TRUE(fs::exists(bench + ".txt"));
  EXPECT_NE(b.out.find("Vectorized"), std::string::npos);
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsWin) {
  const std::string cooc = write("x.cooc", "2 2\n0 0 3\n0 1 2\n");
  const std::string config = write("run.cfg", "dim = 2\nepochs = 3\nlr = 0.5\n");
  const std::string report = path("r.csv");
  ASSERT_EQ(run({"--config", config, "train", "--cooc", cooc, "--out", path("v.txt"), "--report", report,
                 "--epochs", "4", "--log-every", "0"})
                .status,
            0);
  const EmbeddingFile emb = read_embeddings(path("v.txt"));
  EXPECT_EQ(emb.dim(), 2u);
  const std::string csv = slurp(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(run({"--config", path("nope.cfg"), "train", "--cooc", cooc, "--out", path("v.txt")}).status, 1);
}

TEST(CliBinary, HelpAndUnknownSubcommandExitCodes) {
  const std::string bin = WARMGLOVE_CLI_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("train --help"), 0);
  EXPECT_EQ(status("frobnicate"), 1);
  EXPECT_EQ(status("train --cooc /nonexistent/missing.file --out /dev/null"), 2);
}

}  // namespace
}  // namespace warmglove
