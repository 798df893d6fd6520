// Copyright 2026 The SMLP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "smlp/encoding.h"
#include "smlp/model.h"
#include "smlp/paillier.h"

namespace smlp::experiment {

// ------------------------------------------------------------- datasets

struct AndRow {
  double x1 = 0;
  double x2 = 0;
  int label = 0;

  friend bool operator==(const AndRow&, const AndRow&) = default;
};

struct AndDataset {
  std::vector<AndRow> rows;

  std::size_t size() const { return rows.size(); }
  std::vector<std::vector<double>> Inputs() const;
  std::vector<std::vector<double>> Targets() const;
  std::vector<int> Labels() const;
  // Rows [begin, begin + count). Throws ShapeError when out of range.
  AndDataset Slice(std::size_t begin, std::size_t count) const;
};

// round(x1) AND round(x2), rounding half away from zero.
int AndLabel(double x1, double x2);

// x1, x2 uniform in [0, 1) from SeededEntropy(seed).
AndDataset GenerateAndDataset(std::size_t n, std::uint64_t seed);

// "x1,x2,label" with a header line. Doubles are written in shortest
// round-trip form, so regeneration with the same seed is byte-identical.
std::string ToCsv(const AndDataset& data);
// Throws FormatError naming the offending line.
AndDataset ParseCsv(const std::string& text);
AndDataset ReadCsv(const std::filesystem::path& path);
void WriteCsv(const std::filesystem::path& path, const AndDataset& data,
              bool overwrite = true);

// Features and labels at scale Q, each a fresh encryption.
EncryptedDataset EncryptDataset(const AndDataset& data,
                                const paillier::PublicKey& pk,
                                const FixedPointCodec& codec,
                                EntropySource& rng, bool with_labels = true);

// ------------------------------------------------------------- metrics

// Fraction of equal entries. Throws ShapeError on length mismatch or
// empty input.
double Accuracy(std::span<const int> predictions, std::span<const int> labels);

// Class bit of a scale-Q network output: 1 iff output / Q rounds to >= 1.
int ClassFromOutput(const BigInt& output, const BigInt& scale);
int ClassFromOutput(double output);

// ----------------------------------------------------------- convergence

// User-side view of one finished epoch: the decrypted loss sum and all
// weights (flattened, signed, scale Q).
struct EpochRecord {
  std::uint64_t epoch = 0;
  BigInt loss;
  std::vector<BigInt> weights;
};

struct ConvergenceOptions {
  std::size_t window = 10;
  unsigned budget_bits = FixedPointCodec::kDefaultBudgetBits;
};

enum class Divergence { kNone, kOverflow, kRisingLoss, kStalled };

std::string DivergenceName(Divergence d);
Divergence ParseDivergence(const std::string& name);

struct ConvergenceResult {
  Divergence reason = Divergence::kNone;
  std::uint64_t epoch = 0;  // epoch at which divergence was detected

  bool converged() const { return reason == Divergence::kNone; }
};

// Diverged when any weight or loss magnitude exceeds 2^budget_bits, when
// the loss rises strictly over `window` consecutive epochs, or when the
// weights stay bit-identical over the last `window` epochs (the network
// has stopped learning: every ReLU on the gradient path is dead).
ConvergenceResult CheckConvergence(std::span<const EpochRecord> history,
                                   const ConvergenceOptions& options = {});

// ------------------------------------------------------ learning-rate sweep

struct Preset {
  std::string name;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t key_bits = 0;
  std::uint64_t epochs = 0;
  std::size_t trials = 0;
};

// "smoke", "desk" or "full". Throws ShapeError for unknown names.
Preset PresetByName(const std::string& name);
std::vector<std::string> PresetNames();

std::vector<double> DefaultLambdas();
// round(1 / lambda). Throws ShapeError unless 0 < lambda <= 1.
BigInt LearningDivisor(double lambda);

struct RunReport {
  double lambda = 0;
  BigInt learning_divisor;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  bool converged = false;
  std::string reason;  // DivergenceName, or "error: ..." on failure
  double train_accuracy = 0;
  double test_accuracy = 0;
  std::uint64_t epochs = 0;  // epochs actually run
  double wall_seconds = 0;
  std::vector<double> epoch_loss;  // decrypted, divided by Q

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct LambdaSummary {
  double lambda = 0;
  std::size_t trials = 0;
  std::size_t converged_trials = 0;
  bool converged = false;  // strict majority of trials
  double mean_train_accuracy = 0;
  double mean_test_accuracy = 0;
};

struct Table1Report {
  Preset preset;
  std::uint64_t seed = 0;
  std::string init;
  std::vector<RunReport> runs;

  std::vector<LambdaSummary> Summaries() const;
};

struct Table1Options {
  Preset preset;
  std::vector<double> lambdas = DefaultLambdas();
  std::uint64_t seed = 1;
  InitConfig init;
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  ConvergenceOptions convergence;
  // Stop a run as soon as CheckConvergence reports divergence.
  bool stop_on_divergence = true;
  // Evaluate accuracy with encrypted classification instead of the
  // fixed-point forward pass on decrypted weights (bit-identical, slower).
  bool secure_eval = false;
  // Shared dataset (first train_size rows train, next test_size test);
  // otherwise each trial generates its own.
  std::optional<AndDataset> dataset;
  unsigned threads = 1;
  std::function<void(const RunReport&)> on_run;
};

// One encrypted training run over an in-process P1/P2 pair. The keys act
// as the user's: P1 sees only the public key; the harness decrypts the
// weights and loss after each epoch to judge convergence.
RunReport RunTrial(const Table1Options& options, double lambda,
                   std::size_t trial);

// All (lambda, trial) runs. trials == 0 returns an empty report.
Table1Report RunTable1(const Table1Options& options);

// Seed of trial t; keys, data and initial weights derive from it.
std::uint64_t TrialSeed(std::uint64_t root, std::size_t trial);

nlohmann::json ReportToJson(const Table1Report& report);
Table1Report ReportFromJson(const nlohmann::json& doc);
// One column per lambda, "Yes/xx.x%" or "No".
std::string ReportToMarkdown(const Table1Report& report);

}  // namespace smlp::experiment
