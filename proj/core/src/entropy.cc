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

#include "smlp/entropy.h"

#include <sys/random.h>

#include <cerrno>
#include <cstring>
#include <vector>

#include "smlp/errors.h"

namespace smlp {

std::uint64_t EntropySource::NextU64() {
  std::uint8_t buf[8];
  Fill(buf);
  std::uint64_t v = 0;
  for (std::uint8_t b : buf) v = (v << 8) | b;
  return v;
}

double EntropySource::NextUnit() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double EntropySource::UniformReal(double lo, double hi) {
  return lo + (hi - lo) * NextUnit();
}

BigInt EntropySource::UniformBits(std::size_t bits) {
  if (bits == 0) return 0;
  std::vector<std::uint8_t> buf((bits + 7) / 8);
  Fill(buf);
  std::size_t excess = buf.size() * 8 - bits;
  buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
  BigInt out;
  mpz_import(out.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return out;
}

BigInt EntropySource::UniformBelow(const BigInt& bound) {
  if (bound <= 0) throw CryptoError("UniformBelow: bound must be positive");
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  // Rejection sampling; expected fewer than two draws.
  while (true) {
    BigInt candidate = UniformBits(bits);
    if (candidate < bound) return candidate;
  }
}

BigInt EntropySource::UniformInRange(const BigInt& lo, const BigInt& hi) {
  if (lo > hi) throw CryptoError("UniformInRange: empty range");
  BigInt span = hi - lo + 1;
  return lo + UniformBelow(span);
}

SeededEntropy::SeededEntropy(std::uint64_t seed) : engine_(seed) {}

void SeededEntropy::Fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> (56 - 8 * k));
    }
  }
}

void SystemEntropy::Fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    ssize_t n = getrandom(out.data() + done, out.size() - done, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw CryptoError(std::string("getrandom failed: ") +
                        std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::unique_ptr<EntropySource> MakeEntropy(const std::uint64_t* seed) {
  if (seed != nullptr) return std::make_unique<SeededEntropy>(*seed);
  return std::make_unique<SystemEntropy>();
}

std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace smlp
