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
#include <memory>
#include <random>
#include <span>

#include <gmpxx.h>

namespace smlp {

using BigInt = mpz_class;

// Every source of nondeterminism in the library flows through this
// interface. Instances are not thread-safe; each session owns its own.
class EntropySource {
 public:
  virtual ~EntropySource() = default;

  virtual void Fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t NextU64();
  // Uniform double in [0, 1) with 53 bits of precision.
  double NextUnit();
  // Uniform in [lo, hi] (inclusive). Requires lo <= hi.
  double UniformReal(double lo, double hi);
  // Uniform integer with exactly `bits` random bits, i.e. in [0, 2^bits).
  BigInt UniformBits(std::size_t bits);
  // Uniform in [0, bound). Requires bound > 0.
  BigInt UniformBelow(const BigInt& bound);
  // Uniform in [lo, hi] (inclusive). Requires lo <= hi.
  BigInt UniformInRange(const BigInt& lo, const BigInt& hi);
};

// Deterministic stream for tests and reproducible runs.
class SeededEntropy final : public EntropySource {
 public:
  explicit SeededEntropy(std::uint64_t seed);
  void Fill(std::span<std::uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

// Kernel CSPRNG (getrandom). Throws CryptoError on entropy failure.
class SystemEntropy final : public EntropySource {
 public:
  void Fill(std::span<std::uint8_t> out) override;
};

// Seeded when `seed` is set, system entropy otherwise.
std::unique_ptr<EntropySource> MakeEntropy(const std::uint64_t* seed);

// Derives independent child seeds from one root seed (splitmix64).
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream);

}  // namespace smlp
