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

#include <gmpxx.h>

namespace smlp {

using BigInt = mpz_class;

// A residue in Z_n read with the signed rule: m <= (n-1)/2 is m itself,
// anything larger stands for m - n.
struct SignedPlain {
  BigInt residue;

  friend bool operator==(const SignedPlain&, const SignedPlain&) = default;
};

// Round half away from zero.
BigInt RoundToInteger(double x);

// floor(a / d) for d > 0, toward negative infinity.
BigInt FloorDiv(const BigInt& a, const BigInt& d);

// Fixed-point codec: x -> round(Q x) mapped into Z_n.
//
// Every value persisted by the secure engine is kept at scale exactly Q;
// products of two such values live at Q^2 until rescaled. `budget_bits`
// bounds the signed magnitude of any operand handed to a comparison or a
// division so that the blinded values never wrap modulo n.
class FixedPointCodec {
 public:
  static constexpr std::int64_t kDefaultScale = 1'000'000;
  static constexpr unsigned kDefaultBudgetBits = 96;

  // Throws EncodingError unless scale >= 1 and 2^budget_bits < (n-1)/2.
  FixedPointCodec(BigInt modulus, std::int64_t scale = kDefaultScale,
                  unsigned budget_bits = kDefaultBudgetBits);

  const BigInt& modulus() const { return n_; }
  std::int64_t scale() const { return scale_; }
  BigInt scale_big() const { return BigInt(static_cast<long>(scale_)); }
  unsigned budget_bits() const { return budget_bits_; }
  const BigInt& budget() const { return budget_; }
  const BigInt& half_range() const { return half_; }

  // Throws EncodingError when |Q x| exceeds the half-range.
  SignedPlain Encode(double x) const;
  double Decode(const SignedPlain& m) const;

  // round(Q x) as a signed integer, without the modular mapping.
  BigInt Quantize(double x) const;
  // v / Q as a double.
  double Dequantize(const BigInt& v) const;

  BigInt ToSigned(const SignedPlain& m) const;
  // Throws EncodingError when |v| > (n-1)/2.
  SignedPlain FromSigned(const BigInt& v) const;

  bool WithinBudget(const BigInt& signed_value) const;

 private:
  BigInt n_;
  BigInt half_;
  std::int64_t scale_;
  unsigned budget_bits_;
  BigInt budget_;
};

}  // namespace smlp
