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

#include "smlp/model.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "smlp/bytes.h"
#include "smlp/errors.h"
#include "smlp/key_io.h"

namespace smlp {
namespace {

using nlohmann::json;

constexpr const char* kModelFormat = "smlp-encrypted-model";
constexpr const char* kDatasetFormat = "smlp-encrypted-dataset";
constexpr const char* kOutputsFormat = "smlp-encrypted-outputs";
constexpr const char* kLossFormat = "smlp-encrypted-loss";

json Header(const char* format, std::int64_t scale, std::uint64_t key_id) {
  std::ostringstream fp;
  fp << std::hex << key_id;
  return json{{"format", format},
              {"version", kFileFormatVersion},
              {"scale", scale},
              {"key_fingerprint", fp.str()}};
}

void CheckHeader(const json& doc, const char* format) {
  if (DocumentFormat(doc) != format) {
    throw FormatError(std::string("expected a ") + format + " document, got " +
                      DocumentFormat(doc));
  }
  if (doc.value("version", -1) != kFileFormatVersion) {
    throw FormatError("unsupported file version");
  }
}

std::uint64_t ReadFingerprint(const json& doc) {
  try {
    return std::stoull(doc.at("key_fingerprint").get<std::string>(), nullptr,
                       16);
  } catch (const std::exception&) {
    throw FormatError("missing or invalid key_fingerprint");
  }
}

json CiphertextsToJson(std::span<const Ciphertext> cts) {
  json arr = json::array();
  for (const auto& c : cts) arr.push_back(ToHex(c.value()));
  return arr;
}

EncVector CiphertextsFromJson(const json& arr, std::uint64_t key_id) {
  if (!arr.is_array()) throw FormatError("expected an array of ciphertexts");
  EncVector out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_string()) throw FormatError("ciphertext must be a hex string");
    out.emplace_back(FromHex(v.get<std::string>()), key_id);
  }
  return out;
}

template <typename F>
auto WrapJson(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

void NetworkSpec::Validate() const {
  if (layer_sizes.size() < 2) {
    throw ShapeError("a network needs an input width and at least one layer");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ShapeError("layer sizes must be >= 1");
  }
}

std::string NetworkSpec::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(layer_sizes[i]);
  }
  return out;
}

NetworkSpec NetworkSpec::Parse(const std::string& text, bool bias) {
  NetworkSpec spec;
  spec.bias = bias;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      spec.layer_sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ShapeError("invalid layer size '" + item + "'");
    }
  }
  spec.Validate();
  return spec;
}

NetworkSpec AndNetworkSpec() { return NetworkSpec{{2, 2, 2, 1}, true}; }

void InitConfig::Validate() const {
  if (!(low <= high) || !std::isfinite(low) || !std::isfinite(high)) {
    throw ShapeError("init range must satisfy low <= high");
  }
  if (kind == Kind::kLogUniform && low <= 0) {
    throw ShapeError("log-uniform init needs a positive lower bound");
  }
}

std::string InitConfig::ToString() const {
  std::ostringstream os;
  os << (kind == Kind::kUniform ? "uniform" : "loguniform") << ":" << low
     << ":" << high;
  if (random_sign) os << ":signed";
  return os.str();
}

InitConfig InitConfig::Parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) {
    throw ShapeError("init must look like uniform:LOW:HIGH or "
                     "loguniform:LOW:HIGH[:signed]");
  }
  InitConfig cfg;
  if (parts[0] == "uniform") {
    cfg.kind = Kind::kUniform;
  } else if (parts[0] == "loguniform") {
    cfg.kind = Kind::kLogUniform;
  } else {
    throw ShapeError("unknown init kind '" + parts[0] + "'");
  }
  try {
    cfg.low = std::stod(parts[1]);
    cfg.high = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw ShapeError("init bounds must be numbers");
  }
  if (parts.size() == 4) {
    if (parts[3] != "signed") throw ShapeError("unknown init flag");
    cfg.random_sign = true;
  }
  cfg.Validate();
  return cfg;
}

std::vector<RealMatrix> SampleWeights(const NetworkSpec& spec,
                                      const InitConfig& init,
                                      EntropySource& rng) {
  spec.Validate();
  init.Validate();
  std::vector<RealMatrix> out;
  for (std::size_t l = 1; l <= spec.num_layers(); ++l) {
    RealMatrix m{spec.rows(l), spec.cols(l), {}};
    m.data.resize(m.rows * m.cols);
    for (double& w : m.data) {
      if (init.kind == InitConfig::Kind::kUniform) {
        w = rng.UniformReal(init.low, init.high);
      } else {
        double e = rng.UniformReal(std::log10(init.low), std::log10(init.high));
        w = std::pow(10.0, e);
        if (init.random_sign && (rng.NextU64() & 1)) w = -w;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

void EncryptedModel::Validate() const {
  spec.Validate();
  if (weights.size() != spec.num_layers()) {
    throw ShapeError("model layer count does not match its spec");
  }
  for (std::size_t l = 1; l <= spec.num_layers(); ++l) {
    const EncMatrix& w = weights[l - 1];
    if (w.rows != spec.rows(l) || w.cols != spec.cols(l) ||
        w.data.size() != w.rows * w.cols) {
      throw ShapeError("weight matrix " + std::to_string(l) +
                       " does not chain with its neighbours");
    }
  }
}

EncryptedModel EncryptModel(const NetworkSpec& spec,
                            std::span<const RealMatrix> weights,
                            const paillier::PublicKey& pk,
                            const FixedPointCodec& codec, EntropySource& rng) {
  EncryptedModel model;
  model.spec = spec;
  model.scale = codec.scale();
  model.key_id = pk.fingerprint();
  for (const RealMatrix& m : weights) {
    EncMatrix enc{m.rows, m.cols, {}};
    for (double w : m.data) {
      enc.data.push_back(paillier::Encrypt(pk, codec.Encode(w).residue, rng));
    }
    model.weights.push_back(std::move(enc));
  }
  model.Validate();
  return model;
}

std::vector<std::vector<BigInt>> DecryptModelWeights(
    const EncryptedModel& model, const paillier::KeyPair& keys,
    const FixedPointCodec& codec) {
  std::vector<std::vector<BigInt>> out;
  for (const EncMatrix& m : model.weights) {
    std::vector<BigInt> layer;
    for (const Ciphertext& c : m.data) {
      layer.push_back(codec.ToSigned(
          SignedPlain{paillier::Decrypt(keys.priv, keys.pub, c)}));
    }
    out.push_back(std::move(layer));
  }
  return out;
}

void EncryptedDataset::Validate() const {
  for (const auto& row : inputs) {
    if (row.size() != features) {
      throw ShapeError("dataset row width does not match feature count");
    }
  }
  if (!labels.empty() && labels.size() != inputs.size()) {
    throw ShapeError("dataset label count does not match row count");
  }
}

std::string DocumentFormat(const json& doc) {
  if (!doc.is_object() || !doc.contains("format") ||
      !doc["format"].is_string()) {
    throw FormatError("document has no format field");
  }
  return doc["format"].get<std::string>();
}

json ModelToJson(const EncryptedModel& model) {
  json doc = Header(kModelFormat, model.scale, model.key_id);
  doc["layers"] = model.spec.layer_sizes;
  doc["bias"] = model.spec.bias;
  doc["epoch"] = model.epoch;
  json weights = json::array();
  for (const EncMatrix& m : model.weights) {
    weights.push_back(json{{"rows", m.rows},
                           {"cols", m.cols},
                           {"data", CiphertextsToJson(m.data)}});
  }
  doc["weights"] = std::move(weights);
  return doc;
}

EncryptedModel ModelFromJson(const json& doc) {
  return WrapJson([&] {
    CheckHeader(doc, kModelFormat);
    EncryptedModel model;
    model.scale = doc.at("scale").get<std::int64_t>();
    model.key_id = ReadFingerprint(doc);
    model.epoch = doc.at("epoch").get<std::uint64_t>();
    model.spec.layer_sizes =
        doc.at("layers").get<std::vector<std::size_t>>();
    model.spec.bias = doc.at("bias").get<bool>();
    for (const json& m : doc.at("weights")) {
      EncMatrix enc;
      enc.rows = m.at("rows").get<std::size_t>();
      enc.cols = m.at("cols").get<std::size_t>();
      enc.data = CiphertextsFromJson(m.at("data"), model.key_id);
      model.weights.push_back(std::move(enc));
    }
    model.Validate();
    return model;
  });
}

json DatasetToJson(const EncryptedDataset& data) {
  json doc = Header(kDatasetFormat, data.scale, data.key_id);
  doc["features"] = data.features;
  json rows = json::array();
  for (const auto& row : data.inputs) rows.push_back(CiphertextsToJson(row));
  doc["inputs"] = std::move(rows);
  doc["labels"] = CiphertextsToJson(data.labels);
  return doc;
}

EncryptedDataset DatasetFromJson(const json& doc) {
  return WrapJson([&] {
    CheckHeader(doc, kDatasetFormat);
    EncryptedDataset data;
    data.scale = doc.at("scale").get<std::int64_t>();
    data.key_id = ReadFingerprint(doc);
    data.features = doc.at("features").get<std::size_t>();
    for (const json& row : doc.at("inputs")) {
      data.inputs.push_back(CiphertextsFromJson(row, data.key_id));
    }
    data.labels = CiphertextsFromJson(doc.at("labels"), data.key_id);
    data.Validate();
    return data;
  });
}

json OutputsToJson(const EncryptedOutputs& out) {
  json doc = Header(kOutputsFormat, out.scale, out.key_id);
  json rows = json::array();
  for (const auto& row : out.outputs) rows.push_back(CiphertextsToJson(row));
  doc["outputs"] = std::move(rows);
  return doc;
}

EncryptedOutputs OutputsFromJson(const json& doc) {
  return WrapJson([&] {
    CheckHeader(doc, kOutputsFormat);
    EncryptedOutputs out;
    out.scale = doc.at("scale").get<std::int64_t>();
    out.key_id = ReadFingerprint(doc);
    for (const json& row : doc.at("outputs")) {
      out.outputs.push_back(CiphertextsFromJson(row, out.key_id));
    }
    return out;
  });
}

json LossHistoryToJson(const EncryptedLossHistory& history) {
  json doc = Header(kLossFormat, history.scale, history.key_id);
  doc["epoch_loss"] = CiphertextsToJson(history.epoch_loss);
  return doc;
}

EncryptedLossHistory LossHistoryFromJson(const json& doc) {
  return WrapJson([&] {
    CheckHeader(doc, kLossFormat);
    EncryptedLossHistory h;
    h.scale = doc.at("scale").get<std::int64_t>();
    h.key_id = ReadFingerprint(doc);
    h.epoch_loss = CiphertextsFromJson(doc.at("epoch_loss"), h.key_id);
    return h;
  });
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& doc,
                   bool overwrite) {
  std::string text = doc.dump(1);
  text.push_back('\n');
  WriteFileBytes(path,
                 std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                           text.size()),
                 overwrite);
}

}  // namespace smlp
