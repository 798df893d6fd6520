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

#include "smlp/encoding.h"

#include <cmath>
#include <string>

#include "smlp/errors.h"

namespace smlp {

BigInt RoundToInteger(double x) {
  if (!std::isfinite(x)) throw EncodingError("cannot encode a non-finite value");
  return BigInt(std::round(x));
}

BigInt FloorDiv(const BigInt& a, const BigInt& d) {
  if (d <= 0) throw EncodingError("FloorDiv requires a positive divisor");
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
  return q;
}

FixedPointCodec::FixedPointCodec(BigInt modulus, std::int64_t scale,
                                 unsigned budget_bits)
    : n_(std::move(modulus)), scale_(scale), budget_bits_(budget_bits) {
  if (scale_ < 1) throw EncodingError("expansion factor must be >= 1");
  half_ = (n_ - 1) / 2;
  mpz_ui_pow_ui(budget_.get_mpz_t(), 2, budget_bits_);
  if (budget_ >= half_) {
    throw EncodingError("magnitude budget 2^" + std::to_string(budget_bits_) +
                        " does not fit the signed half-range");
  }
}

BigInt FixedPointCodec::Quantize(double x) const {
  return RoundToInteger(x * static_cast<double>(scale_));
}

double FixedPointCodec::Dequantize(const BigInt& v) const {
  // Split to keep precision for values past 2^53.
  BigInt whole;
  BigInt rem;
  mpz_fdiv_qr_ui(whole.get_mpz_t(), rem.get_mpz_t(), v.get_mpz_t(),
                 static_cast<unsigned long>(scale_));
  return whole.get_d() + rem.get_d() / static_cast<double>(scale_);
}

SignedPlain FixedPointCodec::Encode(double x) const {
  return FromSigned(Quantize(x));
}

double FixedPointCodec::Decode(const SignedPlain& m) const {
  return Dequantize(ToSigned(m));
}

BigInt FixedPointCodec::ToSigned(const SignedPlain& m) const {
  if (m.residue > half_) return m.residue - n_;
  return m.residue;
}

SignedPlain FixedPointCodec::FromSigned(const BigInt& v) const {
  if (abs(v) > half_) {
    throw EncodingError("value exceeds the signed half-range");
  }
  return SignedPlain{v < 0 ? BigInt(v + n_) : v};
}

bool FixedPointCodec::WithinBudget(const BigInt& signed_value) const {
  return abs(signed_value) <= budget_;
}

}  // namespace smlp
