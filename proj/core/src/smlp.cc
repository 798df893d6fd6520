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

#include "smlp/smlp.h"

namespace smlp {
namespace {

void CheckWidth(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected " +
                     std::to_string(want) + " values, got " +
                     std::to_string(got));
  }
}

}  // namespace

void TrainingConfig::Validate() const {
  if (learning_divisor < 1) {
    throw ShapeError("learning divisor must be at least 1");
  }
}

SecureMlp::SecureMlp(P1Session& session) : session_(session) {}

void SecureMlp::CheckModel(const EncryptedModel& model) const {
  model.Validate();
  if (model.key_id != session_.public_key().fingerprint()) {
    throw CryptoError("model was encrypted under a different key");
  }
}

Ciphertext SecureMlp::WeightedSum(std::span<const Ciphertext> row,
                                  std::span<const Ciphertext> x, bool bias,
                                  const BigInt& scale) {
  CheckWidth(row.size(), x.size() + (bias ? 1 : 0), "weighted sum");
  const auto& pk = session_.public_key();
  Ciphertext acc = session_.Constant(0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc = paillier::Add(pk, acc, session_.Multiply(row[k], x[k]));
  }
  // The bias input is the public constant 1.0 = Q.
  if (bias) acc = paillier::Add(pk, acc, paillier::ScalarMul(pk, row.back(), scale));
  return session_.Rescale(acc, scale);
}

std::pair<Ciphertext, Ciphertext> SecureMlp::Relu(const Ciphertext& y) {
  return session_.MaxWithBit(y, session_.Constant(0));
}

ForwardTrace SecureMlp::Forward(const EncryptedModel& model,
                                std::span<const Ciphertext> x) {
  CheckModel(model);
  const NetworkSpec& spec = model.spec;
  CheckWidth(x.size(), spec.input_width(), "network input");
  const BigInt scale(static_cast<long>(model.scale));
  ForwardTrace trace;
  EncVector in(x.begin(), x.end());
  for (std::size_t l = 1; l <= spec.num_layers(); ++l) {
    const EncMatrix& w = model.weights[l - 1];
    EncVector y, a, bits;
    for (std::size_t j = 0; j < w.rows; ++j) {
      y.push_back(WeightedSum(w.row(j), in, spec.bias, scale));
      auto [act, bit] = Relu(y.back());
      a.push_back(std::move(act));
      bits.push_back(std::move(bit));
    }
    trace.inputs.push_back(in);
    trace.pre_activations.push_back(std::move(y));
    trace.step_bits.push_back(std::move(bits));
    in = a;
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

EncVector SecureMlp::Classify(const EncryptedModel& model,
                              std::span<const Ciphertext> x) {
  return Forward(model, x).output();
}

Ciphertext SecureMlp::SquaredError(std::span<const Ciphertext> out,
                                   std::span<const Ciphertext> t,
                                   const BigInt& scale) {
  CheckWidth(t.size(), out.size(), "target");
  const auto& pk = session_.public_key();
  Ciphertext e = session_.Constant(0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Ciphertext d = paillier::Sub(pk, out[i], t[i]);
    e = paillier::Add(pk, e, session_.Rescale(session_.Multiply(d, d), scale));
  }
  return e;
}

EncryptedGradients SecureMlp::Backprop(const EncryptedModel& model,
                                       const ForwardTrace& trace,
                                       std::span<const Ciphertext> t) {
  CheckModel(model);
  const NetworkSpec& spec = model.spec;
  const std::size_t layers = spec.num_layers();
  CheckWidth(t.size(), spec.output_width(), "target");
  CheckWidth(trace.activations.size(), layers, "trace layers");
  const auto& pk = session_.public_key();
  const BigInt scale(static_cast<long>(model.scale));

  EncryptedGradients out;
  out.deltas.resize(layers);
  out.gradients.resize(layers);

  // delta^(M) = 2 (X - t) * 1{y > 0}
  EncVector delta;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Ciphertext diff = paillier::ScalarMul(
        pk, paillier::Sub(pk, trace.output()[i], t[i]), 2);
    delta.push_back(session_.Multiply(diff, trace.step_bits.back()[i]));
  }
  for (std::size_t l = layers; l >= 1; --l) {
    const EncMatrix& w = model.weights[l - 1];
    const EncVector& in = trace.inputs[l - 1];
    EncMatrix g{w.rows, w.cols, {}};
    g.data.reserve(w.rows * w.cols);
    for (std::size_t j = 0; j < w.rows; ++j) {
      for (std::size_t k = 0; k < in.size(); ++k) {
        g.data.push_back(session_.Multiply(delta[j], in[k]));
      }
      if (spec.bias) g.data.push_back(paillier::ScalarMul(pk, delta[j], scale));
    }
    out.gradients[l - 1] = std::move(g);
    out.deltas[l - 1] = delta;
    if (l == 1) break;
    // delta^(l-1)_k = floor(sum_j w_jk delta_j / Q) * 1{y_k > 0}
    EncVector next;
    for (std::size_t k = 0; k < in.size(); ++k) {
      Ciphertext acc = session_.Constant(0);
      for (std::size_t j = 0; j < w.rows; ++j) {
        acc = paillier::Add(pk, acc, session_.Multiply(w.at(j, k), delta[j]));
      }
      next.push_back(session_.Multiply(session_.Rescale(acc, scale),
                                       trace.step_bits[l - 2][k]));
    }
    delta = std::move(next);
  }
  return out;
}

void SecureMlp::ApplyUpdate(EncryptedModel& model,
                            const EncryptedGradients& grads,
                            const BigInt& learning_divisor) {
  CheckModel(model);
  CheckWidth(grads.gradients.size(), model.weights.size(), "gradient layers");
  const auto& pk = session_.public_key();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l].data;
    const auto& g = grads.gradients[l].data;
    CheckWidth(g.size(), w.size(), "gradient matrix");
    for (std::size_t i = 0; i < w.size(); ++i) {
      Ciphertext step =
          session_.Divide(paillier::Negate(pk, g[i]), learning_divisor);
      w[i] = paillier::Add(pk, w[i], step);
    }
  }
}

Ciphertext SecureMlp::TrainStep(EncryptedModel& model,
                                std::span<const Ciphertext> x,
                                std::span<const Ciphertext> t,
                                const BigInt& learning_divisor) {
  const BigInt scale(static_cast<long>(model.scale));
  ForwardTrace trace = Forward(model, x);
  Ciphertext err = SquaredError(trace.output(), t, scale);
  EncryptedGradients grads = Backprop(model, trace, t);
  ApplyUpdate(model, grads, learning_divisor);
  return err;
}

EncVector SecureMlp::Train(EncryptedModel& model, const EncryptedDataset& data,
                           const TrainingConfig& config,
                           const EpochCallback& on_epoch) {
  config.Validate();
  CheckModel(model);
  data.Validate();
  if (data.size() == 0) throw ShapeError("training set is empty");
  if (!data.labeled()) throw ShapeError("training set has no labels");
  if (data.key_id != model.key_id) {
    throw CryptoError("dataset and model use different keys");
  }
  if (data.scale != model.scale) {
    throw EncodingError("dataset and model use different scales");
  }
  CheckWidth(data.features, model.spec.input_width(), "dataset features");
  if (model.spec.output_width() != 1) {
    throw ShapeError("training expects a single output");
  }
  const auto& pk = session_.public_key();
  EncVector losses;
  while (model.epoch < config.epochs) {
    EncryptedModel next = model;
    Ciphertext loss = session_.Constant(0);
    try {
      for (std::size_t i = 0; i < data.size(); ++i) {
        std::span<const Ciphertext> t(&data.labels[i], 1);
        loss = paillier::Add(
            pk, loss, TrainStep(next, data.inputs[i], t, config.learning_divisor));
      }
    } catch (const ProtocolError& e) {
      throw TrainingInterrupted(
          "training stopped in epoch " + std::to_string(model.epoch + 1) +
              ": " + e.what(),
          model);
    }
    next.epoch = model.epoch + 1;
    model = std::move(next);
    losses.push_back(loss);
    if (on_epoch) on_epoch(model, loss);
  }
  return losses;
}

}  // namespace smlp
