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
#include <span>
#include <vector>

#include "json.hpp"
#include "smlp/encoding.h"
#include "smlp/model.h"
#include "smlp/paillier.h"

// Plaintext reference implementations of the network.
//
// The float model is the clear-domain baseline. The fixed-point model is
// the normative definition of the secure engine's arithmetic: products
// at scale Q^2 accumulated before a single floor rescale per dot product,
// floor division by the learning divisor, and a strict step 1{y > 0}.
// Decrypting any secure intermediate must reproduce it bit for bit.
namespace smlp::oracle {

// ---------------------------------------------------------------- float

struct ClearModel {
  NetworkSpec spec;
  std::vector<RealMatrix> weights;  // weights[l - 1] is W^(l)
};

struct ClearTrace {
  std::vector<std::vector<double>> activations;  // [0] is the input
  std::vector<std::vector<double>> pre_activations;  // [l - 1] is y^(l)
};

double Relu(double y);

ClearTrace ClearForward(const ClearModel& model, std::span<const double> x);
// ||out - t||^2
double ClearLoss(const ClearModel& model, std::span<const double> x,
                 std::span<const double> t);
// d/dW of ClearLoss, one matrix per layer.
std::vector<RealMatrix> ClearBackprop(const ClearModel& model,
                                      std::span<const double> x,
                                      std::span<const double> t);
void ClearSgdStep(ClearModel& model, std::span<const double> x,
                  std::span<const double> t, double learning_rate);

struct ClearTrainOptions {
  double learning_rate = 0.005;
  std::size_t epochs = 100;
  InitConfig init{InitConfig::Kind::kUniform, -0.5, 0.5, false};
  std::uint64_t seed = 1;
  // Re-sample the initial weights (up to `max_redraws` times) while some
  // unit has y <= 0 on every training input, since such a unit never
  // receives a gradient.
  bool redraw_dead = true;
  std::size_t max_redraws = 100;
};

// True if every unit has y > 0 on at least one of `inputs`.
bool AllUnitsActive(const ClearModel& model,
                    std::span<const std::vector<double>> inputs);

ClearModel ClearInit(const NetworkSpec& spec, const InitConfig& init,
                     EntropySource& rng);
// Per-sample SGD in dataset order.
ClearModel ClearTrain(const NetworkSpec& spec,
                      std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets,
                      const ClearTrainOptions& options);
void ClearTrainEpochs(ClearModel& model,
                      std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets,
                      double learning_rate, std::size_t epochs);

nlohmann::json ClearModelToJson(const ClearModel& model);
ClearModel ClearModelFromJson(const nlohmann::json& doc);

// ---------------------------------------------------------- fixed point

using IntVector = std::vector<BigInt>;

struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BigInt> data;

  BigInt& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const BigInt& at(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

struct FixedModel {
  NetworkSpec spec;
  BigInt scale;
  std::vector<IntMatrix> weights;  // scale Q
};

FixedModel Quantize(const ClearModel& model, const FixedPointCodec& codec);
ClearModel Dequantize(const FixedModel& model, const FixedPointCodec& codec);

// Bridges to the encrypted model (user side: decryption needs the keys).
EncryptedModel EncryptFixedModel(const FixedModel& model,
                                 const paillier::PublicKey& pk,
                                 EntropySource& rng);
FixedModel DecryptFixedModel(const EncryptedModel& model,
                             const paillier::KeyPair& keys);

struct FixedTrace {
  std::vector<IntVector> inputs;           // [l - 1] is X^(l-1), no bias
  std::vector<IntVector> pre_activations;  // [l - 1] is y^(l), scale Q
  std::vector<IntVector> activations;      // [l - 1] is X^(l), scale Q
  std::vector<IntVector> step_bits;        // [l - 1] is 1{y^(l) > 0}

  const IntVector& output() const { return activations.back(); }
};

struct FixedGradients {
  std::vector<IntVector> deltas;     // [l - 1] is delta^(l), scale Q
  std::vector<IntMatrix> gradients;  // [l - 1] is dE/dW^(l), scale Q^2
};

// floor(sum_k w_k x_k / Q) with the bias column fed by Q.
BigInt FixedWeightedSum(std::span<const BigInt> row, std::span<const BigInt> x,
                        bool bias, const BigInt& scale);
FixedTrace FixedForward(const FixedModel& model, std::span<const BigInt> x);
// sum_i floor((out_i - t_i)^2 / Q)
BigInt FixedSquaredError(std::span<const BigInt> out, std::span<const BigInt> t,
                         const BigInt& scale);
FixedGradients FixedBackprop(const FixedModel& model, const FixedTrace& trace,
                             std::span<const BigInt> t);
// W += floor(-G / L)
void FixedUpdate(FixedModel& model, const FixedGradients& grads,
                 const BigInt& learning_divisor);
// Forward, backprop and update on one sample; returns the squared error.
BigInt FixedTrainStep(FixedModel& model, std::span<const BigInt> x,
                      std::span<const BigInt> t,
                      const BigInt& learning_divisor);

}  // namespace smlp::oracle
