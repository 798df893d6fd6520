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

#include <filesystem>
#include <set>

#include "gtest/gtest.h"
#include "smlp/bytes.h"
#include "smlp/errors.h"
#include "smlp/key_io.h"
#include "test_support.h"

namespace smlp::paillier {
namespace {

using testing_support::TestKeys;

BigInt Dec(const Ciphertext& c) {
  return Decrypt(TestKeys().priv, TestKeys().pub, c);
}

TEST(PaillierKeygen, ModulusHasRequestedBits) {
  SeededEntropy rng(1);
  for (std::size_t bits : {256u, 512u}) {
    KeyPair k = GenerateKeyPair(bits, rng);
    EXPECT_EQ(k.pub.bits(), bits);
    EXPECT_EQ(mpz_sizeinbase(k.pub.n().get_mpz_t(), 2), bits);
    EXPECT_TRUE(CheckKeyPair(k));
    EXPECT_EQ(k.pub.g(), k.pub.n() + 1);
  }
}

TEST(PaillierKeygen, IndependentEntropyGivesDistinctModuli) {
  SeededEntropy a(11), b(12);
  EXPECT_NE(GenerateKeyPair(256, a).pub.n(), GenerateKeyPair(256, b).pub.n());
}

TEST(PaillierKeygen, SameSeedIsDeterministic) {
  SeededEntropy a(5), b(5);
  EXPECT_EQ(GenerateKeyPair(256, a).pub.n(), GenerateKeyPair(256, b).pub.n());
}

TEST(PaillierKeygen, RejectsSmallOrOddSizes) {
  SeededEntropy rng(1);
  EXPECT_THROW(GenerateKeyPair(128, rng), CryptoError);
  EXPECT_THROW(GenerateKeyPair(257, rng), CryptoError);
}

TEST(PaillierKeygen, GeneratorCondition) {
  const KeyPair& k = TestKeys();
  BigInt u;
  mpz_powm(u.get_mpz_t(), k.pub.g().get_mpz_t(), k.priv.lambda.get_mpz_t(),
           k.pub.n_squared().get_mpz_t());
  BigInt l = (u - 1) / k.pub.n();
  BigInt gcd;
  mpz_gcd(gcd.get_mpz_t(), l.get_mpz_t(), k.pub.n().get_mpz_t());
  EXPECT_EQ(gcd, 1);
}

TEST(PaillierEncrypt, RoundTrip) {
  SeededEntropy rng(2);
  EXPECT_EQ(Dec(Encrypt(TestKeys().pub, 12345, rng)), 12345);
  EXPECT_EQ(Dec(Encrypt(TestKeys().pub, 7, rng)), 7);
  BigInt top = TestKeys().pub.n() - 1;
  EXPECT_EQ(Dec(Encrypt(TestKeys().pub, top, rng)), top);
}

TEST(PaillierEncrypt, RandomRoundTrips) {
  SeededEntropy rng(3);
  const auto& pk = TestKeys().pub;
  for (int i = 0; i < 1000; ++i) {
    BigInt m = rng.UniformBelow(pk.n());
    ASSERT_EQ(Dec(Encrypt(pk, m, rng)), m);
  }
}

TEST(PaillierEncrypt, ZeroTwiceDiffers) {
  SeededEntropy rng(4);
  Ciphertext a = Encrypt(TestKeys().pub, 0, rng);
  Ciphertext b = Encrypt(TestKeys().pub, 0, rng);
  EXPECT_NE(a, b);
  EXPECT_EQ(Dec(a), 0);
  EXPECT_EQ(Dec(b), 0);
}

TEST(PaillierEncrypt, HundredEncryptionsPairwiseDistinct) {
  SeededEntropy rng(5);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) {
    seen.insert(Encrypt(TestKeys().pub, 42, rng).value().get_str(16));
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(PaillierEncrypt, RangeChecked) {
  SeededEntropy rng(6);
  EXPECT_THROW(Encrypt(TestKeys().pub, TestKeys().pub.n(), rng), CryptoError);
  EXPECT_THROW(Encrypt(TestKeys().pub, -1, rng), CryptoError);
}

TEST(PaillierDecrypt, RejectsMalformed) {
  const auto& pk = TestKeys().pub;
  EXPECT_THROW(Dec(Ciphertext(0, pk.fingerprint())), CryptoError);
  EXPECT_THROW(Dec(Ciphertext(pk.n(), pk.fingerprint())), CryptoError);
  EXPECT_THROW(Dec(Ciphertext(pk.n_squared(), pk.fingerprint())), CryptoError);
}

TEST(PaillierDecrypt, RejectsForeignKey) {
  SeededEntropy rng(7);
  KeyPair other = GenerateKeyPair(256, rng);
  Ciphertext c = Encrypt(other.pub, 1, rng);
  EXPECT_THROW(Dec(c), CryptoError);
  EXPECT_THROW(Add(TestKeys().pub, c, c), CryptoError);
}

TEST(PaillierHomomorphic, Examples) {
  SeededEntropy rng(8);
  const auto& pk = TestKeys().pub;
  auto E = [&](const BigInt& m) { return Encrypt(pk, m, rng); };
  EXPECT_EQ(Dec(Add(pk, E(3), E(4))), 7);
  EXPECT_EQ(Dec(Add(pk, E(5), E(9))), 14);
  EXPECT_EQ(Dec(Add(pk, E(pk.n() - 1), E(1))), 0);
  EXPECT_EQ(Dec(Add(pk, E(99), E(0))), 99);
  EXPECT_EQ(Dec(ScalarMul(pk, E(3), 2)), 6);
  EXPECT_EQ(Dec(ScalarMul(pk, E(31), 1)), 31);
  EXPECT_EQ(Dec(ScalarMul(pk, E(31), pk.n() - 1)), pk.n() - 31);
  EXPECT_EQ(Dec(ScalarMul(pk, E(31), -2)), pk.n() - 62);
  EXPECT_EQ(Dec(Negate(pk, E(0))), 0);
  EXPECT_EQ(Dec(Negate(pk, Negate(pk, E(17)))), 17);
  EXPECT_EQ(Dec(Add(pk, E(10), Negate(pk, E(25)))), pk.n() - 15);
  EXPECT_EQ(Dec(Sub(pk, E(10), E(25))), pk.n() - 15);
  EXPECT_EQ(Dec(Rerandomize(pk, E(77), rng)), 77);
}

TEST(PaillierHomomorphic, RandomTriples) {
  SeededEntropy rng(9);
  const auto& pk = TestKeys().pub;
  const BigInt& n = pk.n();
  for (int i = 0; i < 300; ++i) {
    BigInt m1 = rng.UniformBelow(n), m2 = rng.UniformBelow(n);
    BigInt k = rng.UniformBelow(n);
    Ciphertext c1 = Encrypt(pk, m1, rng), c2 = Encrypt(pk, m2, rng);
    Ciphertext sum = Add(pk, c1, c2);
    Ciphertext prod = ScalarMul(pk, c1, k);
    ASSERT_EQ(Dec(sum), BigInt((m1 + m2) % n));
    ASSERT_EQ(Dec(prod), BigInt((m1 * k) % n));
    for (const Ciphertext* c : {&c1, &sum, &prod}) {
      ASSERT_TRUE(IsValidCiphertext(pk, c->value()));
    }
  }
}

TEST(KeyIo, RoundTrip) {
  const KeyPair& k = TestKeys();
  KeyPair back = ParseKeyPair(SerializeKeyPair(k));
  EXPECT_EQ(back.pub, k.pub);
  EXPECT_EQ(back.priv.lambda, k.priv.lambda);
  EXPECT_EQ(back.priv.mu, k.priv.mu);
  PublicKey pk = ParsePublicKey(SerializePublicKey(k.pub));
  EXPECT_EQ(pk, k.pub);
  EXPECT_EQ(pk.fingerprint(), k.pub.fingerprint());
}

TEST(KeyIo, RejectsCorruptOrMismatchedEnvelopes) {
  Bytes pub = SerializePublicKey(TestKeys().pub);
  EXPECT_THROW(ParseKeyPair(pub), FormatError);
  Bytes bad = pub;
  bad[0] = 'X';
  EXPECT_THROW(ParsePublicKey(bad), FormatError);
  bad = pub;
  bad.resize(bad.size() - 3);
  EXPECT_THROW(ParsePublicKey(bad), FormatError);

  KeyPair broken = TestKeys();
  broken.priv.mu += 1;
  EXPECT_THROW(ParseKeyPair(SerializeKeyPair(broken)), CryptoError);
}

TEST(KeyIo, FilesRefuseOverwrite) {
  auto dir = std::filesystem::temp_directory_path() / "smlp_keyio_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto path = dir / "k.pub";
  WriteFileBytes(path, SerializePublicKey(TestKeys().pub), false);
  EXPECT_EQ(LoadPublicKey(path), TestKeys().pub);
  EXPECT_THROW(WriteFileBytes(path, Bytes{1, 2, 3}, false), FormatError);
  WriteFileBytes(path, SerializePublicKey(TestKeys().pub), true);
  EXPECT_FALSE(PublicKeyToText(TestKeys().pub).empty());
  std::filesystem::remove_all(dir);
}

TEST(Bytes, HexAndBigEndian) {
  BigInt v("123456789abcdef0123", 16);
  EXPECT_EQ(FromBigEndian(ToBigEndian(v)), v);
  EXPECT_EQ(FromHex(ToHex(v)), v);
  EXPECT_THROW(FromHex(""), FormatError);
  EXPECT_THROW(FromHex("zz"), FormatError);
}

TEST(Entropy, UniformBelowStaysInRange) {
  SeededEntropy rng(10);
  BigInt bound(1000003);
  for (int i = 0; i < 2000; ++i) {
    BigInt v = rng.UniformBelow(bound);
    ASSERT_GE(v, 0);
    ASSERT_LT(v, bound);
  }
  for (int i = 0; i < 200; ++i) {
    BigInt v = rng.UniformInRange(BigInt(5), BigInt(9));
    ASSERT_GE(v, 5);
    ASSERT_LE(v, 9);
  }
}

TEST(Entropy, SystemSourceProducesBytes) {
  SystemEntropy rng;
  EXPECT_NE(rng.UniformBits(128), rng.UniformBits(128));
}

}  // namespace
}  // namespace smlp::paillier
