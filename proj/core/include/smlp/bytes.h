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
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace smlp {

using BigInt = mpz_class;
using Bytes = std::vector<std::uint8_t>;

// Unsigned big-endian magnitude; zero encodes as an empty array.
Bytes ToBigEndian(const BigInt& value);
BigInt FromBigEndian(std::span<const std::uint8_t> bytes);

std::string ToHex(const BigInt& value);
// Throws FormatError on anything but [0-9a-fA-F]+.
BigInt FromHex(std::string_view hex);

// Appends big-endian fixed-width fields and length-prefixed integers.
class ByteWriter {
 public:
  void PutU8(std::uint8_t v) { out_.push_back(v); }
  void PutU32(std::uint32_t v);
  void PutU64(std::uint64_t v);
  void PutBytes(std::span<const std::uint8_t> bytes);
  // 4-byte big-endian length followed by the magnitude bytes.
  void PutBigInt(const BigInt& value);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked reader; every Get* throws FormatError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t GetU8();
  std::uint32_t GetU32();
  std::uint64_t GetU64();
  std::span<const std::uint8_t> GetBytes(std::size_t n);
  BigInt GetBigInt(std::size_t max_len);

  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// 64-bit FNV-1a, used for key fingerprints.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace smlp
