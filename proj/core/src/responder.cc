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

#include "smlp/responder.h"

#include <sstream>

#include "smlp/encoding.h"
#include "smlp/errors.h"

namespace smlp {
namespace {

using wire::ErrorCode;
using wire::MessageType;
using wire::ProtocolMessage;

// Operand problems detected before decryption.
struct BadOperand {};

}  // namespace

P2Responder::P2Responder(paillier::KeyPair keys, Logger logger)
    : keys_(std::move(keys)), logger_(std::move(logger)) {
  half_ = (keys_.pub.n() - 1) / 2;
}

BigInt P2Responder::DecryptOperand(const BigInt& value) const {
  if (!paillier::IsValidCiphertext(keys_.pub, value)) throw BadOperand{};
  return paillier::Decrypt(keys_.priv, keys_.pub,
                           paillier::Ciphertext(value, keys_.pub.fingerprint()));
}

BigInt P2Responder::Signed(const BigInt& residue) const {
  return residue > half_ ? BigInt(residue - keys_.pub.n()) : residue;
}

ProtocolMessage P2Responder::Handle(const ProtocolMessage& request,
                                    EntropySource& rng) const {
  const paillier::PublicKey& pk = keys_.pub;
  const BigInt& n = pk.n();
  const auto& p = request.payload;
  ProtocolMessage resp;
  resp.session_id = request.session_id;
  resp.type = wire::ResponseTypeFor(request.type);
  ErrorCode failure = ErrorCode::kInternal;
  bool ok = false;
  try {
    switch (request.type) {
      case MessageType::kMulRequest: {
        if (p.size() != 2) throw BadOperand{};
        BigInt a = DecryptOperand(p[0]);
        BigInt b = DecryptOperand(p[1]);
        BigInt m = (a * b) % n;
        resp.payload.push_back(paillier::Encrypt(pk, m, rng).value());
        break;
      }
      case MessageType::kDivRequest: {
        if (p.size() != 2 || p[1] <= 0 || p[1] >= n) throw BadOperand{};
        BigInt z = Signed(DecryptOperand(p[0]));
        BigInt q = FloorDiv(z, p[1]);
        if (q < 0) q += n;
        resp.payload.push_back(paillier::Encrypt(pk, q, rng).value());
        break;
      }
      case MessageType::kCmpRequest: {
        if (p.size() != 1) throw BadOperand{};
        BigInt v = Signed(DecryptOperand(p[0]));
        BigInt bit = v > 0 ? 1 : 0;
        resp.payload.push_back(paillier::Encrypt(pk, bit, rng).value());
        break;
      }
      default:
        failure = ErrorCode::kUnknownType;
        throw BadOperand{};
    }
    ok = true;
  } catch (const BadOperand&) {
    if (failure == ErrorCode::kInternal) failure = ErrorCode::kBadOperand;
  } catch (const CryptoError&) {
    failure = ErrorCode::kDecryptFailure;
  }
  if (logger_) {
    std::ostringstream line;
    line << "session=" << request.session_id
         << " type=" << wire::TypeName(request.type)
         << " operands=" << p.size()
         << (ok ? " ok" : " error=" + std::to_string(static_cast<int>(failure)));
    logger_(line.str());
  }
  if (!ok) return wire::MakeError(request.session_id, failure);
  return resp;
}

}  // namespace smlp
