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

#include "smlp/bytes.h"

#include <cctype>

#include "smlp/errors.h"

namespace smlp {

Bytes ToBigEndian(const BigInt& value) {
  if (value < 0) throw FormatError("cannot serialize a negative integer");
  if (value == 0) return {};
  std::size_t count = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

BigInt FromBigEndian(std::span<const std::uint8_t> bytes) {
  BigInt out;
  if (!bytes.empty()) {
    mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return out;
}

std::string ToHex(const BigInt& value) { return value.get_str(16); }

BigInt FromHex(std::string_view hex) {
  if (hex.empty()) throw FormatError("empty hex string");
  for (char c : hex) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) {
      throw FormatError("invalid hex digit in '" + std::string(hex) + "'");
    }
  }
  return BigInt(std::string(hex), 16);
}

void ByteWriter::PutU32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::PutU64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::PutBytes(std::span<const std::uint8_t> bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::PutBigInt(const BigInt& value) {
  Bytes mag = ToBigEndian(value);
  PutU32(static_cast<std::uint32_t>(mag.size()));
  PutBytes(mag);
}

std::uint8_t ByteReader::GetU8() { return GetBytes(1)[0]; }

std::uint32_t ByteReader::GetU32() {
  auto b = GetBytes(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::uint64_t ByteReader::GetU64() {
  auto b = GetBytes(8);
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

std::span<const std::uint8_t> ByteReader::GetBytes(std::size_t n) {
  if (remaining() < n) throw FormatError("truncated input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

BigInt ByteReader::GetBigInt(std::size_t max_len) {
  std::uint32_t len = GetU32();
  if (len > max_len) throw FormatError("integer length exceeds limit");
  return FromBigEndian(GetBytes(len));
}

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace smlp
