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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smlp/bytes.h"

namespace smlp::wire {

// Frame layout, big-endian throughout:
//
//   offset  size  field
//   0       4     magic "SMLP" (0x53 0x4D 0x4C 0x50)
//   4       1     version (kVersion)
//   5       1     message type tag
//   6       8     session id
//   14      4     payload count N
//   18      ...   N x (4-byte length L, L bytes unsigned magnitude)
//
// See docs/wire-format.md for the per-type payload schema.
inline constexpr std::uint8_t kMagic[4] = {0x53, 0x4D, 0x4C, 0x50};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 18;
inline constexpr std::uint32_t kMaxPayloadCount = 16;
inline constexpr std::uint32_t kMaxIntegerBytes = 1 << 16;

enum class MessageType : std::uint8_t {
  kMulRequest = 0x01,
  kMulResponse = 0x02,
  kDivRequest = 0x03,
  kDivResponse = 0x04,
  kCmpRequest = 0x05,
  kCmpResponse = 0x06,
  kError = 0x7F,
};

// Carried as payload[0] of an ERR frame.
enum class ErrorCode : std::uint32_t {
  kMalformedFrame = 1,
  kUnknownType = 2,
  kVersionMismatch = 3,
  kBadOperand = 4,
  kDecryptFailure = 5,
  kInternal = 6,
};

std::string TypeName(MessageType type);
bool IsKnownType(std::uint8_t tag);
bool IsRequest(MessageType type);
// kMulRequest -> kMulResponse etc.
MessageType ResponseTypeFor(MessageType request);

struct ProtocolMessage {
  std::uint8_t version = kVersion;
  MessageType type = MessageType::kError;
  std::uint64_t session_id = 0;
  std::vector<BigInt> payload;

  friend bool operator==(const ProtocolMessage&,
                         const ProtocolMessage&) = default;
};

ProtocolMessage MakeError(std::uint64_t session_id, ErrorCode code);

Bytes EncodeFrame(const ProtocolMessage& msg);

// Parses exactly one frame. Unknown type tags and foreign versions are
// returned as-is so the receiver can answer with an ERR frame; framing
// errors (bad magic, truncation, limits, trailing bytes) throw FormatError.
ProtocolMessage DecodeFrame(std::span<const std::uint8_t> frame);

// Header fields needed to pull the rest of a frame off a stream.
struct FrameHeader {
  std::uint8_t version;
  std::uint8_t tag;
  std::uint64_t session_id;
  std::uint32_t count;
};
FrameHeader DecodeHeader(std::span<const std::uint8_t, kHeaderSize> header);

}  // namespace smlp::wire
