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

#include <functional>
#include <string>

#include "smlp/paillier.h"
#include "smlp/transport.h"

namespace smlp {

// P2: holds the key pair and answers blinded MUL / DIV / CMP requests.
//
//   MUL_REQ [E[a'], E[b']]  -> MUL_RESP [E[a' b']]
//   DIV_REQ [E[z], d]       -> DIV_RESP [E[floor(z / d)]]   (z signed)
//   CMP_REQ [E[v]]          -> CMP_RESP [E[1{v > 0}]]       (v signed)
//
// Every response is a fresh encryption. Bad operands yield ERR frames.
// Stateless apart from the read-only key, so one instance serves any
// number of concurrent connections.
class P2Responder final : public transport::RequestHandler {
 public:
  // Receives one line of metadata per request (type, session, outcome).
  using Logger = std::function<void(const std::string&)>;

  explicit P2Responder(paillier::KeyPair keys, Logger logger = nullptr);

  wire::ProtocolMessage Handle(const wire::ProtocolMessage& request,
                               EntropySource& rng) const override;

  const paillier::PublicKey& public_key() const { return keys_.pub; }

 private:
  BigInt DecryptOperand(const BigInt& value) const;
  BigInt Signed(const BigInt& residue) const;

  paillier::KeyPair keys_;
  BigInt half_;
  Logger logger_;
};

}  // namespace smlp
