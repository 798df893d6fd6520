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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "smlp/encoding.h"
#include "smlp/entropy.h"
#include "smlp/paillier.h"

namespace smlp {

using paillier::Ciphertext;
using EncVector = std::vector<Ciphertext>;

// Layer sizes [n_0, ..., n_M]; n_0 is the input width. With `bias` every
// layer's weight matrix has one extra column fed by the constant 1.0.
struct NetworkSpec {
  std::vector<std::size_t> layer_sizes;
  bool bias = true;

  // Throws ShapeError unless there are >= 2 sizes, all >= 1.
  void Validate() const;
  std::size_t num_layers() const { return layer_sizes.size() - 1; }
  std::size_t input_width() const { return layer_sizes.front(); }
  std::size_t output_width() const { return layer_sizes.back(); }
  // Shape of W^(l) for l in [1, num_layers()].
  std::size_t rows(std::size_t layer) const { return layer_sizes[layer]; }
  std::size_t cols(std::size_t layer) const {
    return layer_sizes[layer - 1] + (bias ? 1 : 0);
  }
  std::string ToString() const;
  static NetworkSpec Parse(const std::string& text, bool bias);

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// The two-hidden-layer AND network: 2 inputs, 2 + 2 hidden, 1 output.
NetworkSpec AndNetworkSpec();

// Initial weight distribution.
//   kUniform:    w ~ U[low, high]
//   kLogUniform: |w| = 10^U[log10 low, log10 high], sign random when
//                `random_sign`, positive otherwise. Requires 0 < low.
struct InitConfig {
  enum class Kind { kUniform, kLogUniform };
  Kind kind = Kind::kUniform;
  double low = 0.0;
  double high = 0.5;
  bool random_sign = false;

  void Validate() const;
  std::string ToString() const;
  static InitConfig Parse(const std::string& text);
};

// Real-valued weights, one row-major matrix per layer.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

std::vector<RealMatrix> SampleWeights(const NetworkSpec& spec,
                                      const InitConfig& init,
                                      EntropySource& rng);

struct EncMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Ciphertext> data;

  Ciphertext& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Ciphertext& at(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const Ciphertext> row(std::size_t r) const {
    return std::span<const Ciphertext>(data).subspan(r * cols, cols);
  }
};

// Weights held by P1, all at scale `scale` under the key `key_id`.
struct EncryptedModel {
  NetworkSpec spec;
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  std::uint64_t key_id = 0;
  std::uint64_t epoch = 0;
  std::vector<EncMatrix> weights;  // weights[l - 1] is W^(l)

  // Throws ShapeError if the matrices do not chain per `spec`.
  void Validate() const;
};

EncryptedModel EncryptModel(const NetworkSpec& spec,
                            std::span<const RealMatrix> weights,
                            const paillier::PublicKey& pk,
                            const FixedPointCodec& codec, EntropySource& rng);

// Decrypted signed integer weights at scale Q (user side only).
std::vector<std::vector<BigInt>> DecryptModelWeights(
    const EncryptedModel& model, const paillier::KeyPair& keys,
    const FixedPointCodec& codec);

// Encrypted samples (scale Q features) and labels (scale Q, t in {0, Q}).
struct EncryptedDataset {
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  std::uint64_t key_id = 0;
  std::size_t features = 0;
  std::vector<EncVector> inputs;
  EncVector labels;  // empty for unlabeled classification inputs

  std::size_t size() const { return inputs.size(); }
  bool labeled() const { return !labels.empty(); }
  void Validate() const;
};

// Encrypted classifier outputs returned to the user.
struct EncryptedOutputs {
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  std::uint64_t key_id = 0;
  std::vector<EncVector> outputs;
};

// Encrypted per-epoch squared-error sums recorded during training.
struct EncryptedLossHistory {
  std::int64_t scale = FixedPointCodec::kDefaultScale;
  std::uint64_t key_id = 0;
  EncVector epoch_loss;
};

// JSON documents with a {"format", "version"} header; ciphertexts are
// lowercase hex strings of the residue modulo n^2.
inline constexpr int kFileFormatVersion = 1;

nlohmann::json ModelToJson(const EncryptedModel& model);
EncryptedModel ModelFromJson(const nlohmann::json& doc);
nlohmann::json DatasetToJson(const EncryptedDataset& data);
EncryptedDataset DatasetFromJson(const nlohmann::json& doc);
nlohmann::json OutputsToJson(const EncryptedOutputs& out);
EncryptedOutputs OutputsFromJson(const nlohmann::json& doc);
nlohmann::json LossHistoryToJson(const EncryptedLossHistory& history);
EncryptedLossHistory LossHistoryFromJson(const nlohmann::json& doc);

// Reads the "format" field; throws FormatError if absent.
std::string DocumentFormat(const nlohmann::json& doc);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path,
                   const nlohmann::json& doc, bool overwrite = true);

}  // namespace smlp
