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
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "smlp/errors.h"
#include "smlp/model.h"
#include "smlp/protocols.h"

namespace smlp {

// Encrypted intermediates of one forward pass. Index l - 1 is layer l.
struct ForwardTrace {
  std::vector<EncVector> inputs;           // X^(l-1), without bias
  std::vector<EncVector> pre_activations;  // y^(l), scale Q
  std::vector<EncVector> activations;      // X^(l), scale Q
  std::vector<EncVector> step_bits;        // 1{y^(l) > 0}

  const EncVector& output() const { return activations.back(); }
};

// delta^(l) at scale Q; dE/dW^(l) at scale Q^2.
struct EncryptedGradients {
  std::vector<EncVector> deltas;
  std::vector<EncMatrix> gradients;
};

struct TrainingConfig {
  // L = 1 / lambda. Each update adds floor(-G / L) to every weight.
  BigInt learning_divisor = 100'000'000;
  // Total epochs; training resumes from the model's epoch counter.
  std::uint64_t epochs = 100;

  void Validate() const;
};

// Thrown when a protocol round fails mid-training. `checkpoint` is the
// model as of the last completed epoch and can be passed back to Train().
class TrainingInterrupted : public ProtocolError {
 public:
  TrainingInterrupted(const std::string& what, EncryptedModel checkpoint)
      : ProtocolError(what), checkpoint_(std::move(checkpoint)) {}
  const EncryptedModel& checkpoint() const { return checkpoint_; }

 private:
  EncryptedModel checkpoint_;
};

// The network evaluated and trained by P1 over encrypted values. Every
// product goes through the session's two-party operators; the arithmetic
// order matches oracle::FixedForward / FixedBackprop / FixedUpdate.
class SecureMlp {
 public:
  explicit SecureMlp(P1Session& session);

  // E[floor((sum_k w_k x_k + w_bias Q) / Q)].
  Ciphertext WeightedSum(std::span<const Ciphertext> row,
                         std::span<const Ciphertext> x, bool bias,
                         const BigInt& scale);
  // {E[max(0, y)], E[1{y > 0}]}.
  std::pair<Ciphertext, Ciphertext> Relu(const Ciphertext& y);

  ForwardTrace Forward(const EncryptedModel& model,
                       std::span<const Ciphertext> x);
  EncVector Classify(const EncryptedModel& model,
                     std::span<const Ciphertext> x);
  // E[sum_i floor((out_i - t_i)^2 / Q)].
  Ciphertext SquaredError(std::span<const Ciphertext> out,
                          std::span<const Ciphertext> t, const BigInt& scale);
  EncryptedGradients Backprop(const EncryptedModel& model,
                              const ForwardTrace& trace,
                              std::span<const Ciphertext> t);
  void ApplyUpdate(EncryptedModel& model, const EncryptedGradients& grads,
                   const BigInt& learning_divisor);
  // One stochastic step; returns the sample's encrypted squared error.
  Ciphertext TrainStep(EncryptedModel& model, std::span<const Ciphertext> x,
                       std::span<const Ciphertext> t,
                       const BigInt& learning_divisor);

  // Called after each epoch with the updated model (epoch counter already
  // advanced) and that epoch's encrypted squared-error sum.
  using EpochCallback =
      std::function<void(const EncryptedModel&, const Ciphertext&)>;

  // Per-sample SGD in dataset order from model.epoch up to config.epochs.
  // Returns the encrypted loss of each epoch run. Throws
  // TrainingInterrupted on protocol failure.
  EncVector Train(EncryptedModel& model, const EncryptedDataset& data,
                  const TrainingConfig& config,
                  const EpochCallback& on_epoch = nullptr);

  P1Session& session() { return session_; }

 private:
  void CheckModel(const EncryptedModel& model) const;

  P1Session& session_;
};

}  // namespace smlp
