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

#include <stdexcept>
#include <string>

namespace smlp {

// Base of every error raised by the library. The CLI maps the subclasses
// below onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Key generation, encryption/decryption, range and key-identity failures.
class CryptoError : public Error {
 public:
  using Error::Error;
};

// Transport failures, malformed frames, timeouts and ERR responses from P2.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Fixed-point overflow of the signed half-range or magnitude budget.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector/matrix dimensions or inconsistent network specs.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed files (CSV, model, key, dataset, report).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace smlp
