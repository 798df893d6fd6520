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

#include <filesystem>
#include <string>

#include "smlp/bytes.h"
#include "smlp/paillier.h"

namespace smlp {

// Versioned binary envelope:
//   "SMLK" | version u8 | kind u8 (1 = public, 2 = private) | count u32 |
//   count x (len u32, big-endian magnitude)
// Public keys carry [n]; private keys carry [n, lambda, mu].
inline constexpr std::uint8_t kKeyFileVersion = 1;

Bytes SerializePublicKey(const paillier::PublicKey& pk);
Bytes SerializeKeyPair(const paillier::KeyPair& keys);
paillier::PublicKey ParsePublicKey(std::span<const std::uint8_t> bytes);
// Throws CryptoError if the stored material fails CheckKeyPair.
paillier::KeyPair ParseKeyPair(std::span<const std::uint8_t> bytes);

paillier::PublicKey LoadPublicKey(const std::filesystem::path& path);
paillier::KeyPair LoadKeyPair(const std::filesystem::path& path);

Bytes ReadFileBytes(const std::filesystem::path& path);
// Throws FormatError if the file exists and `overwrite` is false.
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes, bool overwrite);

// Hex text form for CLI output.
std::string PublicKeyToText(const paillier::PublicKey& pk);

}  // namespace smlp
