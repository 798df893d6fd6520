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

#include "smlp/paillier.h"

#include "smlp/bytes.h"
#include "smlp/errors.h"

namespace smlp::paillier {
namespace {

constexpr int kMaxPrimeCandidates = 1 << 16;

BigInt L(const BigInt& u, const BigInt& n) { return (u - 1) / n; }

BigInt PowMod(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
           mod.get_mpz_t());
  return out;
}

// Random prime with exactly `bits` bits and the two top bits set, so that a
// product of two such primes has exactly 2*bits bits.
BigInt RandomPrime(std::size_t bits, EntropySource& rng) {
  for (int attempt = 0; attempt < kMaxPrimeCandidates; ++attempt) {
    BigInt candidate = rng.UniformBits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityReps) > 0) {
      return candidate;
    }
  }
  throw CryptoError("prime generation exceeded its retry budget");
}

void RequireSameKey(const PublicKey& pk, const Ciphertext& c) {
  if (c.key_id() != pk.fingerprint()) {
    throw CryptoError("ciphertext was produced under a different key");
  }
}

}  // namespace

PublicKey::PublicKey(BigInt modulus) : n_(std::move(modulus)) {
  if (n_ < 3 || mpz_even_p(n_.get_mpz_t())) {
    throw CryptoError("invalid Paillier modulus");
  }
  g_ = n_ + 1;
  n_squared_ = n_ * n_;
  fingerprint_ = Fnv1a64(ToBigEndian(n_));
}

std::size_t PublicKey::bits() const {
  return mpz_sizeinbase(n_.get_mpz_t(), 2);
}

KeyPair GenerateKeyPair(std::size_t bits, EntropySource& rng) {
  if (bits < kMinKeyBits) {
    throw CryptoError("key size must be at least 256 bits");
  }
  if (bits % 2 != 0) throw CryptoError("key size must be even");
  std::size_t half = bits / 2;
  while (true) {
    BigInt p = RandomPrime(half, rng);
    BigInt q = RandomPrime(half, rng);
    if (p == q) continue;
    BigInt n = p * q;
    BigInt phi = (p - 1) * (q - 1);
    BigInt g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    KeyPair keys{PublicKey(n), {}};
    mpz_lcm(keys.priv.lambda.get_mpz_t(), BigInt(p - 1).get_mpz_t(),
            BigInt(q - 1).get_mpz_t());
    BigInt u = L(PowMod(keys.pub.g(), keys.priv.lambda, keys.pub.n_squared()),
                 n);
    if (mpz_invert(keys.priv.mu.get_mpz_t(), u.get_mpz_t(), n.get_mpz_t()) ==
        0) {
      continue;
    }
    return keys;
  }
}

bool CheckKeyPair(const KeyPair& keys) {
  const PublicKey& pk = keys.pub;
  BigInt u = L(PowMod(pk.g(), keys.priv.lambda, pk.n_squared()), pk.n());
  BigInt g;
  mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), pk.n().get_mpz_t());
  if (g != 1) return false;
  BigInt mu_check = (u * keys.priv.mu) % pk.n();
  return mu_check == 1 && pk.bits() >= kMinKeyBits;
}

Ciphertext Encrypt(const PublicKey& pk, const BigInt& m, EntropySource& rng) {
  if (m < 0 || m >= pk.n()) throw CryptoError("plaintext out of range");
  BigInt r;
  BigInt gcd;
  do {
    r = rng.UniformBelow(pk.n());
    mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk.n().get_mpz_t());
  } while (r == 0 || gcd != 1);
  // g^m = (1 + n)^m = 1 + m n mod n^2.
  BigInt gm = (1 + m * pk.n()) % pk.n_squared();
  BigInt c = (gm * PowMod(r, pk.n(), pk.n_squared())) % pk.n_squared();
  return Ciphertext(std::move(c), pk.fingerprint());
}

Ciphertext EncryptTrivial(const PublicKey& pk, const BigInt& m) {
  BigInt reduced = m % pk.n();
  if (reduced < 0) reduced += pk.n();
  return Ciphertext((1 + reduced * pk.n()) % pk.n_squared(), pk.fingerprint());
}

BigInt Decrypt(const PrivateKey& sk, const PublicKey& pk, const Ciphertext& c) {
  RequireSameKey(pk, c);
  if (!IsValidCiphertext(pk, c.value())) {
    throw CryptoError("malformed ciphertext");
  }
  BigInt u = L(PowMod(c.value(), sk.lambda, pk.n_squared()), pk.n());
  return (u * sk.mu) % pk.n();
}

Ciphertext Add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  RequireSameKey(pk, a);
  RequireSameKey(pk, b);
  return Ciphertext((a.value() * b.value()) % pk.n_squared(), pk.fingerprint());
}

Ciphertext Negate(const PublicKey& pk, const Ciphertext& c) {
  RequireSameKey(pk, c);
  BigInt inv;
  if (mpz_invert(inv.get_mpz_t(), c.value().get_mpz_t(),
                 pk.n_squared().get_mpz_t()) == 0) {
    throw CryptoError("ciphertext is not invertible");
  }
  return Ciphertext(std::move(inv), pk.fingerprint());
}

Ciphertext Sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  return Add(pk, a, Negate(pk, b));
}

Ciphertext ScalarMul(const PublicKey& pk, const Ciphertext& c,
                     const BigInt& k) {
  RequireSameKey(pk, c);
  BigInt exp = k % pk.n();
  if (exp < 0) exp += pk.n();
  return Ciphertext(PowMod(c.value(), exp, pk.n_squared()), pk.fingerprint());
}

Ciphertext Rerandomize(const PublicKey& pk, const Ciphertext& c,
                       EntropySource& rng) {
  return Add(pk, c, Encrypt(pk, 0, rng));
}

bool IsValidCiphertext(const PublicKey& pk, const BigInt& value) {
  if (value <= 0 || value >= pk.n_squared()) return false;
  BigInt g;
  mpz_gcd(g.get_mpz_t(), value.get_mpz_t(), pk.n().get_mpz_t());
  return g == 1;
}

}  // namespace smlp::paillier
