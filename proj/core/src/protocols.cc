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

#include "smlp/protocols.h"

#include <atomic>

#include "smlp/errors.h"

namespace smlp {
namespace {

using wire::MessageType;

std::atomic<std::uint64_t> g_next_session_id{1};

BigInt Pow2(unsigned bits) {
  BigInt v = 1;
  v <<= bits;
  return v;
}

}  // namespace

P1Session::P1Session(const paillier::PublicKey& pk,
                     transport::Channel& channel, EntropySource& rng,
                     BlindingParams params)
    : pk_(pk),
      channel_(channel),
      rng_(rng),
      params_(params),
      id_(g_next_session_id.fetch_add(1)) {
  half_ = (pk_.n() - 1) / 2;
  r_min_ = Pow2(params_.r_min_bits);
  r_max_ = r_min_ + Pow2(params_.r_span_bits);
  r_prime_max_ = Pow2(params_.r_prime_bits);
  div_bound_ = Pow2(params_.div_bound_bits);
  if (r_min_ <= r_prime_max_) {
    throw ProtocolError("comparison mask r must exceed r'");
  }
  if (r_max_ * Pow2(params_.compare_bound_bits) + r_prime_max_ >= half_) {
    throw ProtocolError("comparison blinding range wraps for this key size");
  }
  // Divide() also checks the divisor-dependent mask bound per call.
  if (div_bound_ * Pow2(params_.div_stat_bits + 1) >= half_) {
    throw ProtocolError("division blinding range wraps for this key size");
  }
}

BigInt P1Session::Mod(const BigInt& v) const {
  BigInt r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), pk_.n().get_mpz_t());
  return r;
}

Ciphertext P1Session::Wrap(const BigInt& value) const {
  return Ciphertext(value, pk_.fingerprint());
}

Ciphertext P1Session::Encrypt(const BigInt& value) {
  return paillier::Encrypt(pk_, Mod(value), rng_);
}

Ciphertext P1Session::Constant(const BigInt& value) const {
  return paillier::EncryptTrivial(pk_, Mod(value));
}

std::vector<BigInt> P1Session::Round(MessageType type,
                                     std::vector<BigInt> payload) {
  wire::ProtocolMessage req;
  req.type = type;
  req.session_id = id_;
  req.payload = std::move(payload);
  wire::ProtocolMessage resp = channel_.SendRequest(req);
  if (resp.type == MessageType::kError) {
    std::string code = resp.payload.empty() ? "?" : resp.payload[0].get_str();
    throw ProtocolError("P2 answered " + wire::TypeName(type) +
                        " with error code " + code);
  }
  if (resp.type != wire::ResponseTypeFor(type) || resp.payload.size() != 1) {
    throw ProtocolError("unexpected " + wire::TypeName(resp.type) +
                        " in reply to " + wire::TypeName(type));
  }
  if (!paillier::IsValidCiphertext(pk_, resp.payload[0])) {
    throw ProtocolError("P2 returned an invalid ciphertext");
  }
  return std::move(resp.payload);
}

Ciphertext P1Session::Multiply(const Ciphertext& a, const Ciphertext& b) {
  BigInt ra = rng_.UniformBelow(pk_.n());
  BigInt rb = rng_.UniformBelow(pk_.n());
  Ciphertext a_masked = paillier::Add(pk_, a, paillier::Encrypt(pk_, ra, rng_));
  Ciphertext b_masked = paillier::Add(pk_, b, paillier::Encrypt(pk_, rb, rng_));
  ++counters_.mul;
  auto out = Round(MessageType::kMulRequest,
                   {a_masked.value(), b_masked.value()});
  // (a + ra)(b + rb) - a rb - b ra - ra rb
  Ciphertext m = Wrap(out[0]);
  m = paillier::Add(pk_, m, paillier::ScalarMul(pk_, a, -rb));
  m = paillier::Add(pk_, m, paillier::ScalarMul(pk_, b, -ra));
  return paillier::Add(pk_, m, Constant(-(ra * rb)));
}

Ciphertext P1Session::Divide(const Ciphertext& a, const BigInt& d) {
  if (d <= 0) throw ProtocolError("division by a non-positive divisor");
  // r = d s with s >= floor(A / d) + 1 keeps a + r positive, and since r
  // is a multiple of d, floor((a + r) / d) - s = floor(a / d) exactly.
  BigInt s_min = div_bound_ / d + 1;
  BigInt s_max = s_min * (Pow2(params_.div_stat_bits) + 1);
  if (d * s_max + div_bound_ >= half_) {
    throw ProtocolError("divisor too large for the division blinding range");
  }
  BigInt s = rng_.UniformInRange(s_min, s_max);
  Ciphertext z = paillier::Add(pk_, a, paillier::Encrypt(pk_, d * s, rng_));
  ++counters_.div;
  auto out = Round(MessageType::kDivRequest, {z.value(), d});
  return paillier::Add(pk_, Wrap(out[0]), Constant(-s));
}

Ciphertext P1Session::Rescale(const Ciphertext& a, const BigInt& scale) {
  return Divide(a, scale);
}

Ciphertext P1Session::Compare(const Ciphertext& a, const Ciphertext& b) {
  BigInt r = rng_.UniformInRange(r_min_, r_max_);
  BigInt r_prime = rng_.UniformInRange(BigInt(1), r_prime_max_);
  // E[r (a - b) - r'], freshly randomized by the r' encryption.
  Ciphertext v = paillier::ScalarMul(pk_, paillier::Sub(pk_, a, b), r);
  v = paillier::Add(pk_, v, paillier::Encrypt(pk_, Mod(-r_prime), rng_));
  ++counters_.cmp;
  auto out = Round(MessageType::kCmpRequest, {v.value()});
  return Wrap(out[0]);
}

std::pair<Ciphertext, Ciphertext> P1Session::MaxWithBit(const Ciphertext& a,
                                                        const Ciphertext& b) {
  Ciphertext bit = Compare(a, b);
  // E[i (a - b) + b]
  Ciphertext m = Multiply(paillier::Sub(pk_, a, b), bit);
  return {paillier::Add(pk_, m, b), bit};
}

Ciphertext P1Session::Max(const Ciphertext& a, const Ciphertext& b) {
  return MaxWithBit(a, b).first;
}

Ciphertext P1Session::Step(const Ciphertext& y) {
  return Compare(y, Constant(0));
}

std::vector<Ciphertext> P1Session::Hadamard(std::span<const Ciphertext> u,
                                            std::span<const Ciphertext> v,
                                            const BigInt& scale) {
  if (u.size() != v.size()) {
    throw ShapeError("Hadamard operands differ in length: " +
                     std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  }
  std::vector<Ciphertext> out;
  out.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.push_back(Rescale(Multiply(u[i], v[i]), scale));
  }
  return out;
}

wire::ProtocolMessage RecordingChannel::SendRequest(
    const wire::ProtocolMessage& request) {
  requests_.push_back(request);
  wire::ProtocolMessage resp = inner_.SendRequest(request);
  responses_.push_back(resp);
  return resp;
}

void RecordingChannel::Clear() {
  requests_.clear();
  responses_.clear();
}

}  // namespace smlp
