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

#include "smlp/oracle.h"

#include <algorithm>

#include "smlp/errors.h"

namespace smlp::oracle {
namespace {

void CheckWidth(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected width " +
                     std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

double Relu(double y) { return y >= 0 ? y : 0.0; }

ClearTrace ClearForward(const ClearModel& model, std::span<const double> x) {
  const NetworkSpec& spec = model.spec;
  CheckWidth(x.size(), spec.input_width(), "ClearForward input");
  ClearTrace trace;
  trace.activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 1; l <= spec.num_layers(); ++l) {
    const RealMatrix& w = model.weights[l - 1];
    const auto& in = trace.activations.back();
    std::vector<double> y(w.rows);
    for (std::size_t j = 0; j < w.rows; ++j) {
      double acc = 0;
      for (std::size_t k = 0; k < in.size(); ++k) acc += w.at(j, k) * in[k];
      if (spec.bias) acc += w.at(j, in.size());
      y[j] = acc;
    }
    std::vector<double> a(y.size());
    std::transform(y.begin(), y.end(), a.begin(), Relu);
    trace.pre_activations.push_back(std::move(y));
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

double ClearLoss(const ClearModel& model, std::span<const double> x,
                 std::span<const double> t) {
  ClearTrace trace = ClearForward(model, x);
  const auto& out = trace.activations.back();
  CheckWidth(t.size(), out.size(), "ClearLoss target");
  double e = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    e += (out[i] - t[i]) * (out[i] - t[i]);
  }
  return e;
}

std::vector<RealMatrix> ClearBackprop(const ClearModel& model,
                                      std::span<const double> x,
                                      std::span<const double> t) {
  const NetworkSpec& spec = model.spec;
  ClearTrace trace = ClearForward(model, x);
  const std::size_t layers = spec.num_layers();
  CheckWidth(t.size(), spec.output_width(), "ClearBackprop target");

  std::vector<RealMatrix> grads(layers);
  std::vector<double> delta(spec.output_width());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    double step = trace.pre_activations[layers - 1][i] > 0 ? 1.0 : 0.0;
    delta[i] = 2.0 * (trace.activations[layers][i] - t[i]) * step;
  }
  for (std::size_t l = layers; l >= 1; --l) {
    const RealMatrix& w = model.weights[l - 1];
    const auto& in = trace.activations[l - 1];
    RealMatrix g{w.rows, w.cols, std::vector<double>(w.rows * w.cols)};
    for (std::size_t j = 0; j < w.rows; ++j) {
      for (std::size_t k = 0; k < in.size(); ++k) g.at(j, k) = delta[j] * in[k];
      if (spec.bias) g.at(j, in.size()) = delta[j];
    }
    grads[l - 1] = std::move(g);
    if (l == 1) break;
    std::vector<double> next(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      double back = 0;
      for (std::size_t j = 0; j < w.rows; ++j) back += w.at(j, k) * delta[j];
      next[k] = trace.pre_activations[l - 2][k] > 0 ? back : 0.0;
    }
    delta = std::move(next);
  }
  return grads;
}

void ClearSgdStep(ClearModel& model, std::span<const double> x,
                  std::span<const double> t, double learning_rate) {
  auto grads = ClearBackprop(model, x, t);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    for (std::size_t i = 0; i < grads[l].data.size(); ++i) {
      model.weights[l].data[i] -= learning_rate * grads[l].data[i];
    }
  }
}

ClearModel ClearInit(const NetworkSpec& spec, const InitConfig& init,
                     EntropySource& rng) {
  return ClearModel{spec, SampleWeights(spec, init, rng)};
}

void ClearTrainEpochs(ClearModel& model,
                      std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets,
                      double learning_rate, std::size_t epochs) {
  CheckWidth(targets.size(), inputs.size(), "ClearTrain targets");
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      ClearSgdStep(model, inputs[i], targets[i], learning_rate);
    }
  }
}

bool AllUnitsActive(const ClearModel& model,
                    std::span<const std::vector<double>> inputs) {
  std::vector<std::vector<bool>> seen;
  for (const RealMatrix& w : model.weights) seen.emplace_back(w.rows, false);
  for (const auto& x : inputs) {
    ClearTrace trace = ClearForward(model, x);
    for (std::size_t l = 0; l < seen.size(); ++l) {
      for (std::size_t j = 0; j < seen[l].size(); ++j) {
        if (trace.pre_activations[l][j] > 0) seen[l][j] = true;
      }
    }
  }
  for (const auto& layer : seen) {
    for (bool b : layer) {
      if (!b) return false;
    }
  }
  return true;
}

ClearModel ClearTrain(const NetworkSpec& spec,
                      std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets,
                      const ClearTrainOptions& options) {
  SeededEntropy rng(options.seed);
  ClearModel model = ClearInit(spec, options.init, rng);
  for (std::size_t i = 0; options.redraw_dead && i < options.max_redraws &&
                          !AllUnitsActive(model, inputs);
       ++i) {
    model = ClearInit(spec, options.init, rng);
  }
  ClearTrainEpochs(model, inputs, targets, options.learning_rate,
                   options.epochs);
  return model;
}

nlohmann::json ClearModelToJson(const ClearModel& model) {
  nlohmann::json doc{{"format", "smlp-clear-model"},
                     {"version", kFileFormatVersion},
                     {"layers", model.spec.layer_sizes},
                     {"bias", model.spec.bias}};
  nlohmann::json weights = nlohmann::json::array();
  for (const RealMatrix& m : model.weights) {
    weights.push_back(
        nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}});
  }
  doc["weights"] = std::move(weights);
  return doc;
}

ClearModel ClearModelFromJson(const nlohmann::json& doc) {
  if (DocumentFormat(doc) != "smlp-clear-model") {
    throw FormatError("not a clear model document");
  }
  try {
    ClearModel model;
    model.spec.layer_sizes = doc.at("layers").get<std::vector<std::size_t>>();
    model.spec.bias = doc.at("bias").get<bool>();
    model.spec.Validate();
    for (const auto& m : doc.at("weights")) {
      RealMatrix w{m.at("rows").get<std::size_t>(),
                   m.at("cols").get<std::size_t>(),
                   m.at("data").get<std::vector<double>>()};
      model.weights.push_back(std::move(w));
    }
    if (model.weights.size() != model.spec.num_layers()) {
      throw ShapeError("clear model layer count does not match its spec");
    }
    for (std::size_t l = 1; l <= model.spec.num_layers(); ++l) {
      const RealMatrix& w = model.weights[l - 1];
      if (w.rows != model.spec.rows(l) || w.cols != model.spec.cols(l) ||
          w.data.size() != w.rows * w.cols) {
        throw ShapeError("clear model matrix shape mismatch");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed clear model: ") + e.what());
  }
}

FixedModel Quantize(const ClearModel& model, const FixedPointCodec& codec) {
  FixedModel out{model.spec, codec.scale_big(), {}};
  for (const RealMatrix& m : model.weights) {
    IntMatrix q{m.rows, m.cols, {}};
    for (double w : m.data) q.data.push_back(codec.Quantize(w));
    out.weights.push_back(std::move(q));
  }
  return out;
}

ClearModel Dequantize(const FixedModel& model, const FixedPointCodec& codec) {
  ClearModel out{model.spec, {}};
  for (const IntMatrix& m : model.weights) {
    RealMatrix r{m.rows, m.cols, {}};
    for (const BigInt& w : m.data) r.data.push_back(codec.Dequantize(w));
    out.weights.push_back(std::move(r));
  }
  return out;
}

EncryptedModel EncryptFixedModel(const FixedModel& model,
                                 const paillier::PublicKey& pk,
                                 EntropySource& rng) {
  FixedPointCodec codec(pk.n(), model.scale.get_si());
  EncryptedModel out;
  out.spec = model.spec;
  out.scale = codec.scale();
  out.key_id = pk.fingerprint();
  for (const IntMatrix& m : model.weights) {
    EncMatrix enc{m.rows, m.cols, {}};
    for (const BigInt& w : m.data) {
      enc.data.push_back(paillier::Encrypt(pk, codec.FromSigned(w).residue, rng));
    }
    out.weights.push_back(std::move(enc));
  }
  out.Validate();
  return out;
}

FixedModel DecryptFixedModel(const EncryptedModel& model,
                             const paillier::KeyPair& keys) {
  FixedPointCodec codec(keys.pub.n(), model.scale);
  FixedModel out{model.spec, codec.scale_big(), {}};
  auto weights = DecryptModelWeights(model, keys, codec);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.weights.push_back(IntMatrix{model.weights[l].rows,
                                    model.weights[l].cols,
                                    std::move(weights[l])});
  }
  return out;
}

BigInt FixedWeightedSum(std::span<const BigInt> row, std::span<const BigInt> x,
                        bool bias, const BigInt& scale) {
  CheckWidth(row.size(), x.size() + (bias ? 1 : 0), "FixedWeightedSum");
  BigInt acc = 0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += row[k] * x[k];
  if (bias) acc += row[x.size()] * scale;
  return FloorDiv(acc, scale);
}

FixedTrace FixedForward(const FixedModel& model, std::span<const BigInt> x) {
  const NetworkSpec& spec = model.spec;
  CheckWidth(x.size(), spec.input_width(), "FixedForward input");
  FixedTrace trace;
  IntVector in(x.begin(), x.end());
  for (std::size_t l = 1; l <= spec.num_layers(); ++l) {
    const IntMatrix& w = model.weights[l - 1];
    IntVector y(w.rows), a(w.rows), bits(w.rows);
    for (std::size_t j = 0; j < w.rows; ++j) {
      y[j] = FixedWeightedSum(
          std::span<const BigInt>(w.data).subspan(j * w.cols, w.cols), in,
          spec.bias, model.scale);
      bits[j] = y[j] > 0 ? 1 : 0;
      a[j] = y[j] * bits[j];
    }
    trace.inputs.push_back(in);
    trace.pre_activations.push_back(std::move(y));
    trace.step_bits.push_back(std::move(bits));
    in = a;
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

BigInt FixedSquaredError(std::span<const BigInt> out, std::span<const BigInt> t,
                         const BigInt& scale) {
  CheckWidth(t.size(), out.size(), "FixedSquaredError");
  BigInt e = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    BigInt d = out[i] - t[i];
    e += FloorDiv(d * d, scale);
  }
  return e;
}

FixedGradients FixedBackprop(const FixedModel& model, const FixedTrace& trace,
                             std::span<const BigInt> t) {
  const NetworkSpec& spec = model.spec;
  const std::size_t layers = spec.num_layers();
  CheckWidth(t.size(), spec.output_width(), "FixedBackprop target");
  FixedGradients out;
  out.deltas.resize(layers);
  out.gradients.resize(layers);

  IntVector delta(spec.output_width());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = 2 * (trace.output()[i] - t[i]) * trace.step_bits.back()[i];
  }
  for (std::size_t l = layers; l >= 1; --l) {
    const IntMatrix& w = model.weights[l - 1];
    const IntVector& in = trace.inputs[l - 1];
    IntMatrix g{w.rows, w.cols, std::vector<BigInt>(w.rows * w.cols)};
    for (std::size_t j = 0; j < w.rows; ++j) {
      for (std::size_t k = 0; k < in.size(); ++k) g.at(j, k) = delta[j] * in[k];
      if (spec.bias) g.at(j, in.size()) = delta[j] * model.scale;
    }
    out.gradients[l - 1] = std::move(g);
    out.deltas[l - 1] = delta;
    if (l == 1) break;
    IntVector next(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      BigInt acc = 0;
      for (std::size_t j = 0; j < w.rows; ++j) acc += w.at(j, k) * delta[j];
      next[k] = FloorDiv(acc, model.scale) * trace.step_bits[l - 2][k];
    }
    delta = std::move(next);
  }
  return out;
}

void FixedUpdate(FixedModel& model, const FixedGradients& grads,
                 const BigInt& learning_divisor) {
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l].data;
    const auto& g = grads.gradients[l].data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] += FloorDiv(-g[i], learning_divisor);
    }
  }
}

BigInt FixedTrainStep(FixedModel& model, std::span<const BigInt> x,
                      std::span<const BigInt> t,
                      const BigInt& learning_divisor) {
  FixedTrace trace = FixedForward(model, x);
  BigInt err = FixedSquaredError(trace.output(), t, model.scale);
  FixedGradients grads = FixedBackprop(model, trace, t);
  FixedUpdate(model, grads, learning_divisor);
  return err;
}

}  // namespace smlp::oracle
