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

#include <gmpxx.h>

#include "smlp/entropy.h"

namespace smlp::paillier {

// Public key (n, g) with g = n + 1. `fingerprint` identifies the key in
// ciphertexts and file headers.
class PublicKey {
 public:
  PublicKey() = default;
  // Throws CryptoError for even or too-small moduli.
  explicit PublicKey(BigInt modulus);

  const BigInt& n() const { return n_; }
  const BigInt& g() const { return g_; }
  const BigInt& n_squared() const { return n_squared_; }
  std::size_t bits() const;
  std::uint64_t fingerprint() const { return fingerprint_; }

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.n_ == b.n_;
  }

 private:
  BigInt n_;
  BigInt g_;
  BigInt n_squared_;
  std::uint64_t fingerprint_ = 0;
};

// lambda = lcm(p - 1, q - 1); mu = L(g^lambda mod n^2)^-1 mod n.
struct PrivateKey {
  BigInt lambda;
  BigInt mu;
};

struct KeyPair {
  PublicKey pub;
  PrivateKey priv;
};

// An element of Z*_{n^2} tagged with the fingerprint of the key it was
// produced under. Immutable value type.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(BigInt value, std::uint64_t key_id)
      : value_(std::move(value)), key_id_(key_id) {}

  const BigInt& value() const { return value_; }
  std::uint64_t key_id() const { return key_id_; }

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.key_id_ == b.key_id_ && a.value_ == b.value_;
  }

 private:
  BigInt value_;
  std::uint64_t key_id_ = 0;
};

inline constexpr std::size_t kMinKeyBits = 256;
// Miller-Rabin rounds beyond GMP's BPSW pass; error probability <= 4^-40.
inline constexpr int kPrimalityReps = 40;

// Generates a key pair whose modulus has exactly `bits` bits. Throws
// CryptoError for bits < kMinKeyBits or when prime search exhausts its
// retry budget.
KeyPair GenerateKeyPair(std::size_t bits, EntropySource& rng);

// gcd(L(g^lambda mod n^2), n) == 1 and decryption of E[1] returns 1.
bool CheckKeyPair(const KeyPair& keys);

// c = g^m * r^n mod n^2 with fresh r in Z*_n. Requires 0 <= m < n.
Ciphertext Encrypt(const PublicKey& pk, const BigInt& m, EntropySource& rng);

// Deterministic encoding with r = 1. Not semantically secure: only for
// constants that are folded into other ciphertexts locally.
Ciphertext EncryptTrivial(const PublicKey& pk, const BigInt& m);

// m = L(c^lambda mod n^2) * mu mod n. Throws CryptoError when c is not
// invertible modulo n^2 or belongs to another key.
BigInt Decrypt(const PrivateKey& sk, const PublicKey& pk, const Ciphertext& c);

// Homomorphic operations. All throw CryptoError on key mismatch.
Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext Sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext Negate(const PublicKey& pk, const Ciphertext& c);
// Decrypts to m * k mod n; k may be negative and is reduced mod n.
Ciphertext ScalarMul(const PublicKey& pk, const Ciphertext& c, const BigInt& k);
// Same plaintext, fresh randomness.
Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& c,
                       EntropySource& rng);

// Structural check for ciphertexts received over the wire.
bool IsValidCiphertext(const PublicKey& pk, const BigInt& value);

}  // namespace smlp::paillier
