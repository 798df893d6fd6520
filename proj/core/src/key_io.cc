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

#include "smlp/key_io.h"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "smlp/errors.h"

namespace smlp {
namespace {

constexpr char kMagic[4] = {'S', 'M', 'L', 'K'};
constexpr std::uint8_t kKindPublic = 1;
constexpr std::uint8_t kKindPrivate = 2;
constexpr std::size_t kMaxIntegerBytes = 1 << 16;

Bytes Envelope(std::uint8_t kind, std::initializer_list<const BigInt*> ints) {
  ByteWriter w;
  for (char c : kMagic) w.PutU8(static_cast<std::uint8_t>(c));
  w.PutU8(kKeyFileVersion);
  w.PutU8(kind);
  w.PutU32(static_cast<std::uint32_t>(ints.size()));
  for (const BigInt* v : ints) w.PutBigInt(*v);
  return w.Take();
}

std::vector<BigInt> OpenEnvelope(std::span<const std::uint8_t> bytes,
                                 std::uint8_t expected_kind) {
  ByteReader r(bytes);
  for (char c : kMagic) {
    if (r.GetU8() != static_cast<std::uint8_t>(c)) {
      throw FormatError("not a key file (bad magic)");
    }
  }
  if (r.GetU8() != kKeyFileVersion) {
    throw FormatError("unsupported key file version");
  }
  if (r.GetU8() != expected_kind) throw FormatError("unexpected key kind");
  std::uint32_t count = r.GetU32();
  if (count > 8) throw FormatError("too many integers in key file");
  std::vector<BigInt> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    out.push_back(r.GetBigInt(kMaxIntegerBytes));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in key file");
  return out;
}

}  // namespace

Bytes SerializePublicKey(const paillier::PublicKey& pk) {
  return Envelope(kKindPublic, {&pk.n()});
}

Bytes SerializeKeyPair(const paillier::KeyPair& keys) {
  return Envelope(kKindPrivate,
                  {&keys.pub.n(), &keys.priv.lambda, &keys.priv.mu});
}

paillier::PublicKey ParsePublicKey(std::span<const std::uint8_t> bytes) {
  auto ints = OpenEnvelope(bytes, kKindPublic);
  if (ints.size() != 1) throw FormatError("public key must hold one integer");
  return paillier::PublicKey(ints[0]);
}

paillier::KeyPair ParseKeyPair(std::span<const std::uint8_t> bytes) {
  auto ints = OpenEnvelope(bytes, kKindPrivate);
  if (ints.size() != 3) {
    throw FormatError("private key must hold three integers");
  }
  paillier::KeyPair keys{paillier::PublicKey(ints[0]), {ints[1], ints[2]}};
  if (!paillier::CheckKeyPair(keys)) {
    throw CryptoError("private key fails the generator check");
  }
  return keys;
}

paillier::PublicKey LoadPublicKey(const std::filesystem::path& path) {
  return ParsePublicKey(ReadFileBytes(path));
}

paillier::KeyPair LoadKeyPair(const std::filesystem::path& path) {
  return ParseKeyPair(ReadFileBytes(path));
}

Bytes ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes, bool overwrite) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw FormatError(path.string() + " exists (use --force to overwrite)");
  }
  // Atomic replace: readers see either the old or the new contents.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string PublicKeyToText(const paillier::PublicKey& pk) {
  std::ostringstream os;
  os << "paillier-public-key v" << int{kKeyFileVersion} << "\n"
     << "bits: " << pk.bits() << "\n"
     << "fingerprint: " << std::hex << pk.fingerprint() << std::dec << "\n"
     << "n: " << ToHex(pk.n()) << "\n";
  return os.str();
}

}  // namespace smlp
