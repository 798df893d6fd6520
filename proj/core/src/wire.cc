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

#include "smlp/wire.h"

#include <algorithm>

#include "smlp/errors.h"

namespace smlp::wire {

std::string TypeName(MessageType type) {
  switch (type) {
    case MessageType::kMulRequest: return "MUL_REQ";
    case MessageType::kMulResponse: return "MUL_RESP";
    case MessageType::kDivRequest: return "DIV_REQ";
    case MessageType::kDivResponse: return "DIV_RESP";
    case MessageType::kCmpRequest: return "CMP_REQ";
    case MessageType::kCmpResponse: return "CMP_RESP";
    case MessageType::kError: return "ERR";
  }
  return "UNKNOWN(" + std::to_string(static_cast<int>(type)) + ")";
}

bool IsKnownType(std::uint8_t tag) {
  return (tag >= 0x01 && tag <= 0x06) || tag == 0x7F;
}

bool IsRequest(MessageType type) {
  return type == MessageType::kMulRequest ||
         type == MessageType::kDivRequest || type == MessageType::kCmpRequest;
}

MessageType ResponseTypeFor(MessageType request) {
  switch (request) {
    case MessageType::kMulRequest: return MessageType::kMulResponse;
    case MessageType::kDivRequest: return MessageType::kDivResponse;
    case MessageType::kCmpRequest: return MessageType::kCmpResponse;
    default: return MessageType::kError;
  }
}

ProtocolMessage MakeError(std::uint64_t session_id, ErrorCode code) {
  return ProtocolMessage{kVersion, MessageType::kError, session_id,
                         {BigInt(static_cast<unsigned long>(code))}};
}

Bytes EncodeFrame(const ProtocolMessage& msg) {
  if (msg.payload.size() > kMaxPayloadCount) {
    throw ProtocolError("payload count exceeds frame limit");
  }
  ByteWriter w;
  w.PutBytes(kMagic);
  w.PutU8(msg.version);
  w.PutU8(static_cast<std::uint8_t>(msg.type));
  w.PutU64(msg.session_id);
  w.PutU32(static_cast<std::uint32_t>(msg.payload.size()));
  for (const BigInt& v : msg.payload) {
    Bytes mag = ToBigEndian(v);
    if (mag.size() > kMaxIntegerBytes) {
      throw ProtocolError("payload integer exceeds frame limit");
    }
    w.PutU32(static_cast<std::uint32_t>(mag.size()));
    w.PutBytes(mag);
  }
  return w.Take();
}

FrameHeader DecodeHeader(std::span<const std::uint8_t, kHeaderSize> header) {
  ByteReader r(header);
  if (!std::equal(std::begin(kMagic), std::end(kMagic),
                  r.GetBytes(4).begin())) {
    throw FormatError("bad frame magic");
  }
  FrameHeader h{};
  h.version = r.GetU8();
  h.tag = r.GetU8();
  h.session_id = r.GetU64();
  h.count = r.GetU32();
  if (h.count > kMaxPayloadCount) {
    throw FormatError("payload count exceeds frame limit");
  }
  return h;
}

ProtocolMessage DecodeFrame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kHeaderSize) throw FormatError("truncated frame header");
  FrameHeader h = DecodeHeader(frame.first<kHeaderSize>());
  ByteReader r(frame.subspan(kHeaderSize));
  ProtocolMessage msg;
  msg.version = h.version;
  msg.type = static_cast<MessageType>(h.tag);
  msg.session_id = h.session_id;
  for (std::uint32_t i = 0; i < h.count; ++i) {
    msg.payload.push_back(r.GetBigInt(kMaxIntegerBytes));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after frame");
  return msg;
}

}  // namespace smlp::wire
