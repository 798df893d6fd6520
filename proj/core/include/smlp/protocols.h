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
#include <utility>
#include <vector>

#include "smlp/encoding.h"
#include "smlp/paillier.h"
#include "smlp/transport.h"

namespace smlp {

using paillier::Ciphertext;

// Mask ranges for the interactive operators.
//
// Comparison: r uniform in [2^r_min_bits, 2^r_min_bits + 2^r_span_bits],
// r' uniform in [1, 2^r_prime_bits], operands |a - b| <= 2^compare_bound_bits.
// Division: operands |a| <= 2^div_bound_bits; the mask is d * s with s
// uniform over 2^div_stat_bits times the operand range.
struct BlindingParams {
  unsigned compare_bound_bits = 96;
  unsigned r_min_bits = 40;
  unsigned r_span_bits = 64;
  unsigned r_prime_bits = 32;
  unsigned div_bound_bits = 192;
  unsigned div_stat_bits = 40;
};

// P1's side of the two-party operators. Holds only the public key; every
// call is one request/response round with P2 over `channel`.
//
// Not thread-safe: one session drives one ordered request stream.
class P1Session {
 public:
  // Throws ProtocolError if the blinding ranges could wrap modulo n.
  P1Session(const paillier::PublicKey& pk, transport::Channel& channel,
            EntropySource& rng, BlindingParams params = {});

  struct Counters {
    std::uint64_t mul = 0;
    std::uint64_t div = 0;
    std::uint64_t cmp = 0;
  };

  std::uint64_t id() const { return id_; }
  const paillier::PublicKey& public_key() const { return pk_; }
  const BlindingParams& params() const { return params_; }
  const Counters& counters() const { return counters_; }

  // Fresh encryption of a signed value.
  Ciphertext Encrypt(const BigInt& value);
  // r = 1 encryption of a signed public constant, for local folding only.
  Ciphertext Constant(const BigInt& value) const;

  // E[a b]. Masks a and b with uniform values in Z_n.
  Ciphertext Multiply(const Ciphertext& a, const Ciphertext& b);
  // E[floor(a / d)] for public d > 0 and |a| within the division bound.
  Ciphertext Divide(const Ciphertext& a, const BigInt& d);
  // E[floor(a / scale)]: brings a product back to scale Q.
  Ciphertext Rescale(const Ciphertext& a, const BigInt& scale);
  // E[1{a > b}].
  Ciphertext Compare(const Ciphertext& a, const Ciphertext& b);
  // {E[max(a, b)], E[1{a > b}]}.
  std::pair<Ciphertext, Ciphertext> MaxWithBit(const Ciphertext& a,
                                               const Ciphertext& b);
  Ciphertext Max(const Ciphertext& a, const Ciphertext& b);
  // E[1{y > 0}].
  Ciphertext Step(const Ciphertext& y);
  // Component-wise Multiply then Rescale. Throws ShapeError on length
  // mismatch.
  std::vector<Ciphertext> Hadamard(std::span<const Ciphertext> u,
                                   std::span<const Ciphertext> v,
                                   const BigInt& scale);

 private:
  std::vector<BigInt> Round(wire::MessageType type,
                            std::vector<BigInt> payload);
  Ciphertext Wrap(const BigInt& value) const;
  BigInt Mod(const BigInt& v) const;

  paillier::PublicKey pk_;
  transport::Channel& channel_;
  EntropySource& rng_;
  BlindingParams params_;
  std::uint64_t id_;
  Counters counters_;
  BigInt half_;
  BigInt r_min_, r_max_, r_prime_max_, div_bound_;
};

// Channel decorator that records every request and response, for
// transcript inspection.
class RecordingChannel final : public transport::Channel {
 public:
  explicit RecordingChannel(transport::Channel& inner) : inner_(inner) {}

  wire::ProtocolMessage SendRequest(
      const wire::ProtocolMessage& request) override;
  void Close() override { inner_.Close(); }

  const std::vector<wire::ProtocolMessage>& requests() const {
    return requests_;
  }
  const std::vector<wire::ProtocolMessage>& responses() const {
    return responses_;
  }
  void Clear();

 private:
  transport::Channel& inner_;
  std::vector<wire::ProtocolMessage> requests_;
  std::vector<wire::ProtocolMessage> responses_;
};

}  // namespace smlp
