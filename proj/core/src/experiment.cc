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

#include "smlp/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "smlp/errors.h"
#include "smlp/key_io.h"
#include "smlp/oracle.h"
#include "smlp/protocols.h"
#include "smlp/responder.h"
#include "smlp/smlp.h"
#include "smlp/transport.h"

namespace smlp::experiment {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

bool ParseDouble(std::string_view text, double& out) {
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size();
}

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Thrown from the epoch callback to end a run that has diverged.
struct StopRun {};

}  // namespace

// ------------------------------------------------------------- datasets

std::vector<std::vector<double>> AndDataset::Inputs() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const AndRow& r : rows) out.push_back({r.x1, r.x2});
  return out;
}

std::vector<std::vector<double>> AndDataset::Targets() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const AndRow& r : rows) out.push_back({static_cast<double>(r.label)});
  return out;
}

std::vector<int> AndDataset::Labels() const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const AndRow& r : rows) out.push_back(r.label);
  return out;
}

AndDataset AndDataset::Slice(std::size_t begin, std::size_t count) const {
  if (begin > rows.size() || count > rows.size() - begin) {
    throw ShapeError("dataset has " + std::to_string(rows.size()) +
                     " rows, cannot take " + std::to_string(count) +
                     " from row " + std::to_string(begin));
  }
  AndDataset out;
  out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                  rows.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return out;
}

int AndLabel(double x1, double x2) {
  return (std::round(x1) >= 1.0 && std::round(x2) >= 1.0) ? 1 : 0;
}

AndDataset GenerateAndDataset(std::size_t n, std::uint64_t seed) {
  SeededEntropy rng(seed);
  AndDataset out;
  out.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AndRow r;
    r.x1 = rng.NextUnit();
    r.x2 = rng.NextUnit();
    r.label = AndLabel(r.x1, r.x2);
    out.rows.push_back(r);
  }
  return out;
}

std::string ToCsv(const AndDataset& data) {
  std::string out = "x1,x2,label\n";
  for (const AndRow& r : data.rows) {
    out += FormatDouble(r.x1);
    out += ',';
    out += FormatDouble(r.x2);
    out += ',';
    out += std::to_string(r.label);
    out += '\n';
  }
  return out;
}

AndDataset ParseCsv(const std::string& text) {
  AndDataset out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = Trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t.rfind("x1", 0) == 0) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      auto comma = t.find(',', start);
      cells.push_back(Trim(std::string_view(t).substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    AndRow r;
    double label = 0;
    if (cells.size() != 3 || !ParseDouble(cells[0], r.x1) ||
        !ParseDouble(cells[1], r.x2) || !ParseDouble(cells[2], label) ||
        (label != 0.0 && label != 1.0) || !std::isfinite(r.x1) ||
        !std::isfinite(r.x2)) {
      throw FormatError("malformed CSV row at line " +
                        std::to_string(line_no) + ": '" + t +
                        "' (expected x1,x2,label with label 0 or 1)");
    }
    r.label = static_cast<int>(label);
    out.rows.push_back(r);
  }
  return out;
}

AndDataset ReadCsv(const std::filesystem::path& path) {
  Bytes raw = ReadFileBytes(path);
  try {
    return ParseCsv(std::string(raw.begin(), raw.end()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteCsv(const std::filesystem::path& path, const AndDataset& data,
              bool overwrite) {
  std::string text = ToCsv(data);
  WriteFileBytes(path, Bytes(text.begin(), text.end()), overwrite);
}

EncryptedDataset EncryptDataset(const AndDataset& data,
                                const paillier::PublicKey& pk,
                                const FixedPointCodec& codec,
                                EntropySource& rng, bool with_labels) {
  EncryptedDataset out;
  out.scale = codec.scale();
  out.key_id = pk.fingerprint();
  out.features = 2;
  out.inputs.reserve(data.size());
  for (const AndRow& r : data.rows) {
    out.inputs.push_back({paillier::Encrypt(pk, codec.Encode(r.x1).residue, rng),
                          paillier::Encrypt(pk, codec.Encode(r.x2).residue, rng)});
    if (with_labels) {
      out.labels.push_back(paillier::Encrypt(
          pk, codec.Encode(static_cast<double>(r.label)).residue, rng));
    }
  }
  return out;
}

// ------------------------------------------------------------- metrics

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ShapeError("accuracy: " + std::to_string(predictions.size()) +
                     " predictions for " + std::to_string(labels.size()) +
                     " labels");
  }
  if (labels.empty()) throw ShapeError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += predictions[i] == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

int ClassFromOutput(const BigInt& output, const BigInt& scale) {
  return 2 * output >= scale ? 1 : 0;
}

int ClassFromOutput(double output) { return output >= 0.5 ? 1 : 0; }

// ----------------------------------------------------------- convergence

std::string DivergenceName(Divergence d) {
  switch (d) {
    case Divergence::kNone: return "converged";
    case Divergence::kOverflow: return "overflow";
    case Divergence::kRisingLoss: return "rising-loss";
    case Divergence::kStalled: return "stalled";
  }
  return "unknown";
}

Divergence ParseDivergence(const std::string& name) {
  for (Divergence d : {Divergence::kNone, Divergence::kOverflow,
                       Divergence::kRisingLoss, Divergence::kStalled}) {
    if (DivergenceName(d) == name) return d;
  }
  throw FormatError("unknown convergence verdict '" + name + "'");
}

ConvergenceResult CheckConvergence(std::span<const EpochRecord> history,
                                   const ConvergenceOptions& options) {
  BigInt budget = 1;
  budget <<= options.budget_bits;
  const std::size_t window = std::max<std::size_t>(options.window, 2);
  std::size_t rising = 1;
  std::size_t unchanged = 1;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const EpochRecord& rec = history[i];
    bool overflow = abs(rec.loss) > budget;
    for (const BigInt& w : rec.weights) overflow = overflow || abs(w) > budget;
    if (overflow) return {Divergence::kOverflow, rec.epoch};
    if (i > 0) {
      rising = rec.loss > history[i - 1].loss ? rising + 1 : 1;
      unchanged = rec.weights == history[i - 1].weights ? unchanged + 1 : 1;
    }
    if (rising >= window) return {Divergence::kRisingLoss, rec.epoch};
    if (unchanged >= window) return {Divergence::kStalled, rec.epoch};
  }
  return {};
}

// ------------------------------------------------------ learning-rate sweep

Preset PresetByName(const std::string& name) {
  if (name == "smoke") return {"smoke", 20, 50, 256, 3, 1};
  if (name == "desk") return {"desk", 200, 500, 512, 30, 3};
  if (name == "full") return {"full", 2000, 8000, 1024, 100, 10};
  throw ShapeError("unknown preset '" + name + "' (smoke, desk, full)");
}

std::vector<std::string> PresetNames() { return {"smoke", "desk", "full"}; }

std::vector<double> DefaultLambdas() { return {1e-12, 1e-10, 1e-8, 1e-6, 1e-4}; }

BigInt LearningDivisor(double lambda) {
  if (!(lambda > 0) || lambda > 1) {
    throw ShapeError("learning rate factor must be in (0, 1]");
  }
  return RoundToInteger(1.0 / lambda);
}

std::uint64_t TrialSeed(std::uint64_t root, std::size_t trial) {
  return DeriveSeed(root, trial);
}

std::vector<LambdaSummary> Table1Report::Summaries() const {
  std::vector<LambdaSummary> out;
  for (const RunReport& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const LambdaSummary& s) {
      return s.lambda == r.lambda;
    });
    if (it == out.end()) {
      out.push_back(LambdaSummary{r.lambda});
      it = out.end() - 1;
    }
    ++it->trials;
    it->converged_trials += r.converged ? 1 : 0;
    it->mean_train_accuracy += r.train_accuracy;
    it->mean_test_accuracy += r.test_accuracy;
  }
  for (LambdaSummary& s : out) {
    s.converged = 2 * s.converged_trials > s.trials;
    s.mean_train_accuracy /= static_cast<double>(s.trials);
    s.mean_test_accuracy /= static_cast<double>(s.trials);
  }
  return out;
}

RunReport RunTrial(const Table1Options& options, double lambda,
                   std::size_t trial) {
  const Preset& preset = options.preset;
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.lambda = lambda;
  report.learning_divisor = LearningDivisor(lambda);
  report.seed = TrialSeed(options.seed, trial);
  report.trial = trial;
  const std::uint64_t seed = report.seed;

  SeededEntropy key_rng(DeriveSeed(seed, 1));
  paillier::KeyPair keys = paillier::GenerateKeyPair(preset.key_bits, key_rng);
  FixedPointCodec codec(keys.pub.n(), options.scale,
                        options.convergence.budget_bits);
  const BigInt scale = codec.scale_big();

  AndDataset all = options.dataset
                       ? *options.dataset
                       : GenerateAndDataset(preset.train_size + preset.test_size,
                                            DeriveSeed(seed, 0));
  AndDataset train = all.Slice(0, preset.train_size);
  AndDataset test = all.Slice(preset.train_size, preset.test_size);

  // User: sample and encrypt the initial model and the training set.
  SeededEntropy init_rng(DeriveSeed(seed, 2));
  SeededEntropy user_rng(DeriveSeed(seed, 3));
  NetworkSpec spec = AndNetworkSpec();
  auto initial = SampleWeights(spec, options.init, init_rng);
  EncryptedModel model = EncryptModel(spec, initial, keys.pub, codec, user_rng);
  EncryptedDataset enc_train = EncryptDataset(train, keys.pub, codec, user_rng);

  // P1 and P2 over an in-process link.
  P2Responder responder(keys);
  auto link = transport::MakeLoopbackPair();
  link.server->Serve(responder,
                     std::make_unique<SeededEntropy>(DeriveSeed(seed, 4)));
  SeededEntropy p1_rng(DeriveSeed(seed, 5));
  P1Session session(keys.pub, *link.client, p1_rng);
  SecureMlp mlp(session);

  std::vector<EpochRecord> history;
  ConvergenceResult verdict;
  auto on_epoch = [&](const EncryptedModel& m, const Ciphertext& loss) {
    EpochRecord rec;
    rec.epoch = m.epoch;
    rec.loss = codec.ToSigned({paillier::Decrypt(keys.priv, keys.pub, loss)});
    for (const auto& layer : DecryptModelWeights(m, keys, codec)) {
      rec.weights.insert(rec.weights.end(), layer.begin(), layer.end());
    }
    report.epoch_loss.push_back(codec.Dequantize(rec.loss));
    history.push_back(std::move(rec));
    verdict = CheckConvergence(history, options.convergence);
    if (!verdict.converged() && options.stop_on_divergence) throw StopRun{};
  };

  TrainingConfig config;
  config.learning_divisor = report.learning_divisor;
  config.epochs = preset.epochs;
  try {
    mlp.Train(model, enc_train, config, on_epoch);
  } catch (const StopRun&) {
  } catch (const Error& e) {
    report.reason = std::string("error: ") + e.what();
  }
  report.epochs = history.size();
  report.converged = report.reason.empty() && verdict.converged();
  if (report.reason.empty()) report.reason = DivergenceName(verdict.reason);

  // User: accuracy of the final model on both splits.
  auto predict = [&](const AndDataset& data) {
    std::vector<int> pred;
    pred.reserve(data.size());
    if (options.secure_eval) {
      EncryptedDataset enc = EncryptDataset(data, keys.pub, codec, user_rng,
                                            /*with_labels=*/false);
      for (const EncVector& x : enc.inputs) {
        Ciphertext out = mlp.Classify(model, x).front();
        BigInt v = codec.ToSigned({paillier::Decrypt(keys.priv, keys.pub, out)});
        pred.push_back(ClassFromOutput(v, scale));
      }
      return pred;
    }
    oracle::FixedModel fixed = oracle::DecryptFixedModel(model, keys);
    for (const AndRow& r : data.rows) {
      oracle::IntVector x{codec.Quantize(r.x1), codec.Quantize(r.x2)};
      pred.push_back(
          ClassFromOutput(oracle::FixedForward(fixed, x).output()[0], scale));
    }
    return pred;
  };
  report.train_accuracy = Accuracy(predict(train), train.Labels());
  report.test_accuracy = Accuracy(predict(test), test.Labels());
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  return report;
}

Table1Report RunTable1(const Table1Options& options) {
  Table1Report report;
  report.preset = options.preset;
  report.seed = options.seed;
  report.init = options.init.ToString();
  struct Job {
    double lambda;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < options.preset.trials; ++t) {
    for (double lambda : options.lambdas) jobs.push_back({lambda, t});
  }
  report.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        RunReport r = RunTrial(options, jobs[i].lambda, jobs[i].trial);
        std::lock_guard lock(mu);
        if (options.on_run) options.on_run(r);
        report.runs[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads && i < jobs.size(); ++i) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  // Runs ordered by lambda, then trial.
  std::stable_sort(report.runs.begin(), report.runs.end(),
                   [&](const RunReport& a, const RunReport& b) {
                     auto ia = std::find(options.lambdas.begin(),
                                         options.lambdas.end(), a.lambda);
                     auto ib = std::find(options.lambdas.begin(),
                                         options.lambdas.end(), b.lambda);
                     return ia < ib;
                   });
  return report;
}

nlohmann::json ReportToJson(const Table1Report& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const RunReport& r : report.runs) {
    runs.push_back({{"lambda", r.lambda},
                    {"learning_divisor", r.learning_divisor.get_str()},
                    {"seed", r.seed},
                    {"trial", r.trial},
                    {"converged", r.converged},
                    {"reason", r.reason},
                    {"train_accuracy", r.train_accuracy},
                    {"test_accuracy", r.test_accuracy},
                    {"epochs", r.epochs},
                    {"wall_seconds", r.wall_seconds},
                    {"epoch_loss", r.epoch_loss}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const LambdaSummary& s : report.Summaries()) {
    summary.push_back({{"lambda", s.lambda},
                       {"trials", s.trials},
                       {"converged_trials", s.converged_trials},
                       {"converged", s.converged},
                       {"mean_train_accuracy", s.mean_train_accuracy},
                       {"mean_test_accuracy", s.mean_test_accuracy}});
  }
  const Preset& p = report.preset;
  return {{"format", "smlp-table1-report"},
          {"version", kFileFormatVersion},
          {"preset",
           {{"name", p.name},
            {"train_size", p.train_size},
            {"test_size", p.test_size},
            {"key_bits", p.key_bits},
            {"epochs", p.epochs},
            {"trials", p.trials}}},
          {"seed", report.seed},
          {"init", report.init},
          {"runs", std::move(runs)},
          {"summary", std::move(summary)}};
}

Table1Report ReportFromJson(const nlohmann::json& doc) {
  if (DocumentFormat(doc) != "smlp-table1-report") {
    throw FormatError("not a table1 report document");
  }
  try {
    Table1Report report;
    const auto& p = doc.at("preset");
    report.preset = Preset{p.at("name").get<std::string>(),
                           p.at("train_size").get<std::size_t>(),
                           p.at("test_size").get<std::size_t>(),
                           p.at("key_bits").get<std::size_t>(),
                           p.at("epochs").get<std::uint64_t>(),
                           p.at("trials").get<std::size_t>()};
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.init = doc.at("init").get<std::string>();
    for (const auto& j : doc.at("runs")) {
      RunReport r;
      r.lambda = j.at("lambda").get<double>();
      r.learning_divisor.set_str(j.at("learning_divisor").get<std::string>(), 10);
      r.seed = j.at("seed").get<std::uint64_t>();
      r.trial = j.at("trial").get<std::size_t>();
      r.converged = j.at("converged").get<bool>();
      r.reason = j.at("reason").get<std::string>();
      r.train_accuracy = j.at("train_accuracy").get<double>();
      r.test_accuracy = j.at("test_accuracy").get<double>();
      r.epochs = j.at("epochs").get<std::uint64_t>();
      r.wall_seconds = j.at("wall_seconds").get<double>();
      r.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
      report.runs.push_back(std::move(r));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed table1 report: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("malformed table1 report: bad learning divisor");
  }
}

std::string ReportToMarkdown(const Table1Report& report) {
  auto summaries = report.Summaries();
  std::ostringstream out;
  out << std::fixed;
  out << "| $\\lambda$ |";
  for (const auto& s : summaries) {
    out << ' ' << FormatDouble(s.lambda) << " |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < summaries.size(); ++i) out << "---|";
  out << "\n| Convergence (Y/N)/Accuracy |";
  for (const auto& s : summaries) {
    if (s.converged) {
      out << " Yes/" << std::setprecision(1) << 100 * s.mean_test_accuracy
          << "% |";
    } else {
      out << " No |";
    }
  }
  out << "\n| Converged trials |";
  for (const auto& s : summaries) {
    out << ' ' << s.converged_trials << '/' << s.trials << " |";
  }
  out << "\n| Train accuracy |";
  for (const auto& s : summaries) {
    out << ' ' << std::setprecision(1) << 100 * s.mean_train_accuracy << "% |";
  }
  out << "\n| Test accuracy |";
  for (const auto& s : summaries) {
    out << ' ' << std::setprecision(1) << 100 * s.mean_test_accuracy << "% |";
  }
  out << "\n\nPreset " << report.preset.name << ": "
      << report.preset.train_size << " train / " << report.preset.test_size
      << " test samples, " << report.preset.key_bits << "-bit keys, "
      << report.preset.epochs << " epochs, " << report.preset.trials
      << " trial(s), seed " << report.seed << ", init " << report.init
      << ".\n";
  return out.str();
}

}  // namespace smlp::experiment
