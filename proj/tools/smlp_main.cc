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

// smlp: command-line front end for the user, P1 and P2 roles.
//
//   user: keygen, gen-dataset, encrypt-dataset, decrypt-result, oracle
//   P1:   train, classify          (public key only)
//   P2:   serve-p2                 (key pair)
//   all:  table1                   (in-process harness)
//
// Exit codes: 0 success, 1 other failure (I/O, format, shape), 2 usage,
// 3 protocol failure, 4 crypto failure.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "smlp/errors.h"
#include "smlp/experiment.h"
#include "smlp/key_io.h"
#include "smlp/model.h"
#include "smlp/oracle.h"
#include "smlp/protocols.h"
#include "smlp/responder.h"
#include "smlp/smlp.h"
#include "smlp/transport.h"

namespace {

using namespace smlp;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitCrypto = 4;

class UsageError : public Error {
 public:
  using Error::Error;
};

volatile std::sig_atomic_t g_signal = 0;

extern "C" void OnSignal(int sig) { g_signal = sig; }

struct Common {
  std::optional<std::uint64_t> seed;
  bool force = false;

  std::unique_ptr<EntropySource> Rng(std::uint64_t stream) const {
    if (!seed) return std::make_unique<SystemEntropy>();
    return std::make_unique<SeededEntropy>(DeriveSeed(*seed, stream));
  }
};

// P1's link to P2: either a socket to serve-p2 or an in-process responder
// built from an explicitly supplied key file.
struct P2Link {
  std::string transport = "socket";
  std::string address;
  std::string p2_keys;

  std::unique_ptr<transport::Channel> channel;
  std::unique_ptr<P2Responder> responder;
  std::unique_ptr<transport::LoopbackServer> server;

  void AddOptions(CLI::App* cmd) {
    cmd->add_option("--transport", transport, "socket or loopback")
        ->check(CLI::IsMember({"socket", "loopback"}));
    cmd->add_option("--p2", address,
                    "P2 address host:port (default: $SMLP_P2_ADDR)");
    cmd->add_option("--p2-keys", p2_keys,
                    "key pair for the in-process P2 (loopback only)");
  }

  void Open(const paillier::PublicKey& pk, const Common& common) {
    if (transport == "loopback") {
      if (p2_keys.empty()) {
        throw UsageError("--transport loopback needs --p2-keys");
      }
      paillier::KeyPair keys = LoadKeyPair(p2_keys);
      if (!(keys.pub == pk)) {
        throw CryptoError("--p2-keys does not match the public key");
      }
      responder = std::make_unique<P2Responder>(std::move(keys));
      auto pair = transport::MakeLoopbackPair();
      pair.server->Serve(*responder, common.Rng(100));
      server = std::move(pair.server);
      channel = std::move(pair.client);
      return;
    }
    if (!p2_keys.empty()) {
      throw UsageError("--p2-keys is only valid with --transport loopback");
    }
    if (address.empty()) {
      if (const char* env = std::getenv("SMLP_P2_ADDR")) address = env;
    }
    if (address.empty()) {
      throw UsageError("socket transport needs --p2 or SMLP_P2_ADDR");
    }
    channel = transport::TcpChannel::Connect(transport::Endpoint::Parse(address));
  }
};

std::string Hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// ---------------------------------------------------------------- keygen

struct KeygenArgs {
  std::size_t bits = 1024;
  std::string public_path = "smlp.pub";
  std::string private_path = "smlp.key";
};

int RunKeygen(const KeygenArgs& a, const Common& c) {
  auto rng = c.Rng(1);
  paillier::KeyPair keys = paillier::GenerateKeyPair(a.bits, *rng);
  if (!paillier::CheckKeyPair(keys)) {
    throw CryptoError("generated key pair failed its self-check");
  }
  if (!c.force) {
    for (const auto& p : {a.public_path, a.private_path}) {
      if (fs::exists(p)) {
        throw FormatError(p + " already exists (use --force to overwrite)");
      }
    }
  }
  WriteFileBytes(a.private_path, SerializeKeyPair(keys), c.force);
  WriteFileBytes(a.public_path, SerializePublicKey(keys.pub), c.force);
  std::cout << "bits " << keys.pub.bits() << "\n"
            << "fingerprint " << Hex(keys.pub.fingerprint()) << "\n"
            << "public " << a.public_path << "\n"
            << "private " << a.private_path << "\n";
  return 0;
}

// ------------------------------------------------------------ gen-dataset

struct GenArgs {
  std::size_t rows = 10000;
  std::string out = "and.csv";
};

int RunGenDataset(const GenArgs& a, const Common& c) {
  std::uint64_t seed = c.seed.value_or(1);
  experiment::AndDataset data = experiment::GenerateAndDataset(a.rows, seed);
  experiment::WriteCsv(a.out, data, c.force);
  std::size_t ones = 0;
  for (const auto& r : data.rows) ones += r.label;
  std::cout << "rows " << data.size() << " positives " << ones << " -> "
            << a.out << "\n";
  return 0;
}

// -------------------------------------------------------- encrypt-dataset

struct EncryptArgs {
  std::string input;
  std::string public_key;
  std::string out;
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  std::size_t from = 0;
  std::optional<std::size_t> count;
  bool no_labels = false;
};

int RunEncryptDataset(const EncryptArgs& a, const Common& c) {
  paillier::PublicKey pk = LoadPublicKey(a.public_key);
  FixedPointCodec codec(pk.n(), a.scale);
  experiment::AndDataset data = experiment::ReadCsv(a.input);
  if (a.from > data.size()) throw ShapeError("--from is past the end of the data");
  data = data.Slice(a.from, a.count.value_or(data.size() - a.from));
  auto rng = c.Rng(2);
  EncryptedDataset enc =
      experiment::EncryptDataset(data, pk, codec, *rng, !a.no_labels);
  WriteJsonFile(a.out, DatasetToJson(enc), c.force);
  std::cout << "rows " << enc.size() << (a.no_labels ? " (unlabeled)" : "")
            << " -> " << a.out << "\n";
  return 0;
}

// --------------------------------------------------------------- serve-p2

struct ServeArgs {
  std::string keys;
  std::string listen = "127.0.0.1:7000";
  bool quiet = false;
};

int RunServeP2(const ServeArgs& a, const Common& c) {
  paillier::KeyPair keys = LoadKeyPair(a.keys);
  P2Responder::Logger logger;
  if (!a.quiet) {
    logger = [](const std::string& line) { std::cerr << line << "\n"; };
  }
  P2Responder responder(std::move(keys), logger);
  transport::TcpListener listener(transport::Endpoint::Parse(a.listen));
  transport::P2Server server(responder, std::move(listener), c.seed);

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_signal != 0) {
        server.Stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  std::cout << "listening on "
            << transport::Endpoint::Parse(a.listen).host << ":"
            << server.port() << std::endl;
  try {
    server.Serve();
  } catch (...) {
    done = true;
    watcher.join();
    throw;
  }
  done = true;
  watcher.join();
  std::cout << "stopped after " << server.requests_served() << " requests"
            << std::endl;
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string data;
  std::string public_key;
  std::string model_out;
  std::string loss_out;
  std::string layers = "2,2,2,1";
  bool no_bias = false;
  double lambda = 1e-8;
  std::string divisor;
  std::uint64_t epochs = 100;
  std::string init;
  bool resume = false;
  P2Link link;
};

int RunTrain(TrainArgs& a, const Common& c) {
  paillier::PublicKey pk = LoadPublicKey(a.public_key);
  EncryptedDataset data = DatasetFromJson(ReadJsonFile(a.data));
  if (data.key_id != pk.fingerprint()) {
    throw CryptoError("dataset was encrypted under a different key");
  }
  FixedPointCodec codec(pk.n(), data.scale);

  EncryptedModel model;
  if (a.resume) {
    model = ModelFromJson(ReadJsonFile(a.model_out));
    std::cerr << "resuming from epoch " << model.epoch << "\n";
  } else {
    if (!c.force && fs::exists(a.model_out)) {
      throw FormatError(a.model_out +
                        " already exists (use --force to overwrite or "
                        "--resume to continue it)");
    }
    NetworkSpec spec = NetworkSpec::Parse(a.layers, !a.no_bias);
    InitConfig init = a.init.empty() ? InitConfig{} : InitConfig::Parse(a.init);
    auto init_rng = c.Rng(3);
    auto weights = SampleWeights(spec, init, *init_rng);
    auto enc_rng = c.Rng(4);
    model = EncryptModel(spec, weights, pk, codec, *enc_rng);
  }

  TrainingConfig config;
  config.epochs = a.epochs;
  config.learning_divisor = a.divisor.empty()
                                ? experiment::LearningDivisor(a.lambda)
                                : BigInt(a.divisor);

  a.link.Open(pk, c);
  auto p1_rng = c.Rng(5);
  P1Session session(pk, *a.link.channel, *p1_rng);
  SecureMlp mlp(session);

  EncryptedLossHistory history;
  history.scale = data.scale;
  history.key_id = pk.fingerprint();
  if (a.resume && !a.loss_out.empty() && fs::exists(a.loss_out)) {
    history = LossHistoryFromJson(ReadJsonFile(a.loss_out));
  }
  auto started = std::chrono::steady_clock::now();
  auto checkpoint = [&](const EncryptedModel& m, const Ciphertext& loss) {
    WriteJsonFile(a.model_out, ModelToJson(m), true);
    history.epoch_loss.push_back(loss);
    if (!a.loss_out.empty()) {
      WriteJsonFile(a.loss_out, LossHistoryToJson(history), true);
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    std::cerr << "epoch " << m.epoch << "/" << config.epochs << " done ("
              << std::fixed << std::setprecision(1) << secs << " s)\n";
  };
  try {
    mlp.Train(model, data, config, checkpoint);
  } catch (const TrainingInterrupted& e) {
    WriteJsonFile(a.model_out, ModelToJson(e.checkpoint()), true);
    std::cerr << "checkpoint at epoch " << e.checkpoint().epoch
              << " written to " << a.model_out << "; rerun with --resume\n";
    throw;
  }
  WriteJsonFile(a.model_out, ModelToJson(model), true);
  const auto& n = session.counters();
  std::cout << "epochs " << model.epoch << " rounds mul=" << n.mul
            << " div=" << n.div << " cmp=" << n.cmp << " -> " << a.model_out
            << "\n";
  return 0;
}

// --------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string model;
  std::string input;
  std::string public_key;
  std::string out;
  P2Link link;
};

int RunClassify(ClassifyArgs& a, const Common& c) {
  paillier::PublicKey pk = LoadPublicKey(a.public_key);
  EncryptedModel model = ModelFromJson(ReadJsonFile(a.model));
  EncryptedDataset data = DatasetFromJson(ReadJsonFile(a.input));
  if (data.key_id != pk.fingerprint() || model.key_id != pk.fingerprint()) {
    throw CryptoError("model or inputs were encrypted under a different key");
  }
  a.link.Open(pk, c);
  auto p1_rng = c.Rng(6);
  P1Session session(pk, *a.link.channel, *p1_rng);
  SecureMlp mlp(session);
  EncryptedOutputs out;
  out.scale = model.scale;
  out.key_id = pk.fingerprint();
  for (const EncVector& x : data.inputs) out.outputs.push_back(mlp.Classify(model, x));
  WriteJsonFile(a.out, OutputsToJson(out), c.force);
  std::cout << "classified " << out.outputs.size() << " -> " << a.out << "\n";
  return 0;
}

// --------------------------------------------------------- decrypt-result

struct DecryptArgs {
  std::string keys;
  std::string input;
  std::string out;
};

int RunDecryptResult(const DecryptArgs& a, const Common&) {
  paillier::KeyPair keys = LoadKeyPair(a.keys);
  nlohmann::json doc = ReadJsonFile(a.input);
  const std::string format = DocumentFormat(doc);
  std::ostringstream text;
  text << std::setprecision(9);
  auto value = [&](const Ciphertext& ct, const FixedPointCodec& codec) {
    return codec.Decode({paillier::Decrypt(keys.priv, keys.pub, ct)});
  };
  if (format == "smlp-encrypted-outputs") {
    EncryptedOutputs out = OutputsFromJson(doc);
    FixedPointCodec codec(keys.pub.n(), out.scale);
    text << "row,output,class\n";
    for (std::size_t i = 0; i < out.outputs.size(); ++i) {
      double v = value(out.outputs[i].front(), codec);
      text << i << "," << v << "," << experiment::ClassFromOutput(v) << "\n";
    }
  } else if (format == "smlp-encrypted-model") {
    EncryptedModel model = ModelFromJson(doc);
    FixedPointCodec codec(keys.pub.n(), model.scale);
    auto weights = DecryptModelWeights(model, keys, codec);
    text << "layer,row,col,weight\n";
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const std::size_t cols = model.weights[l].cols;
      for (std::size_t i = 0; i < weights[l].size(); ++i) {
        text << l + 1 << "," << i / cols << "," << i % cols << ","
             << codec.Dequantize(weights[l][i]) << "\n";
      }
    }
  } else if (format == "smlp-encrypted-loss") {
    EncryptedLossHistory h = LossHistoryFromJson(doc);
    FixedPointCodec codec(keys.pub.n(), h.scale);
    text << "epoch,squared_error_sum\n";
    for (std::size_t i = 0; i < h.epoch_loss.size(); ++i) {
      text << i + 1 << "," << value(h.epoch_loss[i], codec) << "\n";
    }
  } else if (format == "smlp-encrypted-dataset") {
    EncryptedDataset d = DatasetFromJson(doc);
    FixedPointCodec codec(keys.pub.n(), d.scale);
    text << "x1,x2" << (d.labeled() ? ",label" : "") << "\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t k = 0; k < d.inputs[i].size(); ++k) {
        text << (k ? "," : "") << value(d.inputs[i][k], codec);
      }
      if (d.labeled()) text << "," << value(d.labels[i], codec);
      text << "\n";
    }
  } else {
    throw FormatError("cannot decrypt documents of format '" + format + "'");
  }
  if (a.out.empty()) {
    std::cout << text.str();
  } else {
    std::string s = text.str();
    WriteFileBytes(a.out, Bytes(s.begin(), s.end()), true);
  }
  return 0;
}

// ----------------------------------------------------------------- table1

struct Table1Args {
  std::string preset = "desk";
  std::vector<double> lambdas;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> epochs;
  std::string init;
  std::string dataset;
  std::string json_out;
  std::string markdown_out;
  unsigned threads = 1;
  bool secure_eval = false;
  bool no_early_stop = false;
};

int RunTable1(const Table1Args& a, const Common& c) {
  experiment::Table1Options opt;
  opt.preset = experiment::PresetByName(a.preset);
  if (a.trials) opt.preset.trials = *a.trials;
  if (a.epochs) opt.preset.epochs = *a.epochs;
  if (!a.lambdas.empty()) opt.lambdas = a.lambdas;
  if (!a.init.empty()) opt.init = InitConfig::Parse(a.init);
  if (!a.dataset.empty()) opt.dataset = experiment::ReadCsv(a.dataset);
  opt.seed = c.seed.value_or(1);
  opt.threads = a.threads;
  opt.secure_eval = a.secure_eval;
  opt.stop_on_divergence = !a.no_early_stop;
  opt.on_run = [](const experiment::RunReport& r) {
    std::cerr << "lambda " << r.lambda << " trial " << r.trial << ": "
              << r.reason << " after " << r.epochs << " epochs, test "
              << std::fixed << std::setprecision(3) << r.test_accuracy
              << ", train " << r.train_accuracy << " (" << std::setprecision(0)
              << r.wall_seconds << " s)" << std::defaultfloat << "\n";
  };
  experiment::Table1Report report = experiment::RunTable1(opt);
  std::string md = experiment::ReportToMarkdown(report);
  if (!a.json_out.empty()) {
    WriteJsonFile(a.json_out, experiment::ReportToJson(report), c.force);
  }
  if (!a.markdown_out.empty()) {
    WriteFileBytes(a.markdown_out, Bytes(md.begin(), md.end()), c.force);
  }
  std::cout << md;
  return 0;
}

// ----------------------------------------------------------------- oracle

struct OracleArgs {
  std::string data;
  std::size_t train_size = 2000;
  double lr = 0.005;
  std::size_t epochs = 100;
  std::string init;
  std::string layers = "2,2,2,1";
  bool no_bias = false;
  std::string model;
  std::string out;
  std::size_t from = 0;
};

double ClearAccuracy(const oracle::ClearModel& m,
                     const experiment::AndDataset& d) {
  std::vector<int> pred;
  for (const auto& x : d.Inputs()) {
    pred.push_back(experiment::ClassFromOutput(
        oracle::ClearForward(m, x).activations.back()[0]));
  }
  return experiment::Accuracy(pred, d.Labels());
}

int RunOracleTrain(const OracleArgs& a, const Common& c) {
  experiment::AndDataset all = experiment::ReadCsv(a.data);
  experiment::AndDataset train = all.Slice(0, a.train_size);
  experiment::AndDataset test = all.Slice(a.train_size, all.size() - a.train_size);
  oracle::ClearTrainOptions opt;
  opt.learning_rate = a.lr;
  opt.epochs = a.epochs;
  opt.seed = c.seed.value_or(1);
  if (!a.init.empty()) opt.init = InitConfig::Parse(a.init);
  NetworkSpec spec = NetworkSpec::Parse(a.layers, !a.no_bias);
  auto inputs = train.Inputs();
  auto targets = train.Targets();
  oracle::ClearModel m = oracle::ClearTrain(spec, inputs, targets, opt);
  if (!a.out.empty()) WriteJsonFile(a.out, oracle::ClearModelToJson(m), c.force);
  std::cout << std::fixed << std::setprecision(4)
            << "train_accuracy " << ClearAccuracy(m, train) << "\n";
  if (test.size() > 0) {
    std::cout << "test_accuracy " << ClearAccuracy(m, test) << "\n";
  }
  return 0;
}

int RunOracleEval(const OracleArgs& a, const Common&) {
  oracle::ClearModel m = oracle::ClearModelFromJson(ReadJsonFile(a.model));
  experiment::AndDataset all = experiment::ReadCsv(a.data);
  experiment::AndDataset d = all.Slice(a.from, all.size() - std::min(a.from, all.size()));
  std::cout << std::fixed << std::setprecision(4) << "accuracy "
            << ClearAccuracy(m, d) << " rows " << d.size() << "\n";
  return 0;
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const ProtocolError*>(&e)) return kExitProtocol;
  if (dynamic_cast<const CryptoError*>(&e)) return kExitCrypto;
  return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multilayer perceptron over Paillier encryption"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "make every random choice deterministic")
      ->each([&](const std::string&) { common.seed = seed; });
  app.add_flag("--force", common.force, "overwrite existing output files");

  KeygenArgs keygen;
  auto* c_keygen = app.add_subcommand("keygen", "generate a Paillier key pair");
  c_keygen->add_option("--bits", keygen.bits, "modulus size")->capture_default_str();
  c_keygen->add_option("--public", keygen.public_path, "public key output")->capture_default_str();
  c_keygen->add_option("--private", keygen.private_path, "key pair output")->capture_default_str();

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen-dataset", "write a random AND dataset as CSV");
  c_gen->add_option("--rows", gen.rows)->capture_default_str();
  c_gen->add_option("--out", gen.out)->capture_default_str();

  EncryptArgs enc;
  auto* c_enc = app.add_subcommand("encrypt-dataset", "encrypt a CSV dataset");
  c_enc->add_option("--input", enc.input, "x1,x2,label CSV")->required();
  c_enc->add_option("--public-key", enc.public_key)->required();
  c_enc->add_option("--out", enc.out)->required();
  c_enc->add_option("--scale", enc.scale, "expansion factor Q")->capture_default_str();
  c_enc->add_option("--from", enc.from, "first row to encrypt");
  c_enc->add_option("--count", enc.count, "number of rows");
  c_enc->add_flag("--no-labels", enc.no_labels, "encrypt features only");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve-p2", "run the key-holding helper server");
  c_serve->add_option("--keys", serve.keys, "key pair file")->required();
  c_serve->add_option("--listen", serve.listen, "host:port, port 0 for any")->capture_default_str();
  c_serve->add_flag("--quiet", serve.quiet, "no per-request log lines");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train a model on an encrypted dataset (P1)");
  c_train->add_option("--data", train.data, "encrypted dataset")->required();
  c_train->add_option("--public-key", train.public_key)->required();
  c_train->add_option("--model-out", train.model_out, "model and per-epoch checkpoint")->required();
  c_train->add_option("--loss-out", train.loss_out, "encrypted per-epoch loss");
  c_train->add_option("--layers", train.layers)->capture_default_str();
  c_train->add_flag("--no-bias", train.no_bias);
  auto* o_lambda = c_train->add_option("--lambda", train.lambda, "learning rate factor")->capture_default_str();
  c_train->add_option("--divisor", train.divisor, "learning divisor L = 1/lambda")->excludes(o_lambda);
  c_train->add_option("--epochs", train.epochs)->capture_default_str();
  c_train->add_option("--init", train.init, "uniform:LO:HI or loguniform:LO:HI[:signed]");
  c_train->add_flag("--resume", train.resume, "continue the checkpoint in --model-out");
  train.link.AddOptions(c_train);

  ClassifyArgs cls;
  auto* c_cls = app.add_subcommand("classify", "evaluate a model on encrypted inputs (P1)");
  c_cls->add_option("--model", cls.model)->required();
  c_cls->add_option("--input", cls.input, "encrypted dataset")->required();
  c_cls->add_option("--public-key", cls.public_key)->required();
  c_cls->add_option("--out", cls.out)->required();
  cls.link.AddOptions(c_cls);

  DecryptArgs dec;
  auto* c_dec = app.add_subcommand("decrypt-result", "decrypt an output, model, loss or dataset file");
  c_dec->add_option("--keys", dec.keys, "key pair file")->required();
  c_dec->add_option("--input", dec.input)->required();
  c_dec->add_option("--out", dec.out, "CSV output (default stdout)");

  Table1Args t1;
  auto* c_t1 = app.add_subcommand("table1", "learning-rate sweep over encrypted training");
  c_t1->add_option("--preset", t1.preset)->check(CLI::IsMember(experiment::PresetNames()))->capture_default_str();
  c_t1->add_option("--lambdas", t1.lambdas)->delimiter(',');
  c_t1->add_option("--trials", t1.trials);
  c_t1->add_option("--epochs", t1.epochs);
  c_t1->add_option("--init", t1.init);
  c_t1->add_option("--dataset", t1.dataset, "CSV shared by all trials");
  c_t1->add_option("--json", t1.json_out);
  c_t1->add_option("--markdown", t1.markdown_out);
  c_t1->add_option("--threads", t1.threads)->capture_default_str();
  c_t1->add_flag("--secure-eval", t1.secure_eval, "measure accuracy by encrypted classification");
  c_t1->add_flag("--no-early-stop", t1.no_early_stop, "run every epoch even after divergence");

  OracleArgs ot, oe;
  auto* c_oracle = app.add_subcommand("oracle", "clear-domain float baseline");
  c_oracle->require_subcommand(1);
  auto* c_ot = c_oracle->add_subcommand("train", "train on the first --train-size rows, test on the rest");
  c_ot->add_option("--data", ot.data)->required();
  c_ot->add_option("--train-size", ot.train_size)->capture_default_str();
  c_ot->add_option("--lr", ot.lr)->capture_default_str();
  c_ot->add_option("--epochs", ot.epochs)->capture_default_str();
  c_ot->add_option("--init", ot.init, "default uniform:-0.5:0.5");
  c_ot->add_option("--layers", ot.layers)->capture_default_str();
  c_ot->add_flag("--no-bias", ot.no_bias);
  c_ot->add_option("--out", ot.out, "clear model JSON");
  auto* c_oe = c_oracle->add_subcommand("eval", "accuracy of a clear model");
  c_oe->add_option("--model", oe.model)->required();
  c_oe->add_option("--data", oe.data)->required();
  c_oe->add_option("--from", oe.from, "first row to evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_keygen) return RunKeygen(keygen, common);
    if (*c_gen) return RunGenDataset(gen, common);
    if (*c_enc) return RunEncryptDataset(enc, common);
    if (*c_serve) return RunServeP2(serve, common);
    if (*c_train) return RunTrain(train, common);
    if (*c_cls) return RunClassify(cls, common);
    if (*c_dec) return RunDecryptResult(dec, common);
    if (*c_t1) return RunTable1(t1, common);
    if (*c_ot) return RunOracleTrain(ot, common);
    if (*c_oe) return RunOracleEval(oe, common);
  } catch (const std::exception& e) {
    std::cerr << "smlp: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitUsage;
}
