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

#include "smlp/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "smlp/errors.h"

namespace smlp::transport {
namespace {

using wire::ErrorCode;
using wire::MessageType;

constexpr int kPollIntervalMs = 100;

std::string ErrnoText(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

// Reads exactly `out.size()` bytes. Returns false on clean EOF before the
// first byte; throws ProtocolError on errors, timeouts and partial reads.
bool ReadFull(int fd, std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    ssize_t n = ::recv(fd, out.data() + done, out.size() - done, 0);
    if (n == 0) {
      if (done == 0) return false;
      throw ProtocolError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw ProtocolError("timed out waiting for peer");
      }
      throw ProtocolError(ErrnoText("recv"));
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void WriteFull(int fd, std::span<const std::uint8_t> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::send(fd, data.data() + done, data.size() - done,
                       MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        throw ProtocolError("timed out sending to peer");
      }
      throw ProtocolError(ErrnoText("send"));
    }
    done += static_cast<std::size_t>(n);
  }
}

// Pulls one complete frame off a stream socket. nullopt on clean EOF.
// FormatError for frames that cannot be delimited (bad magic, limits).
std::optional<Bytes> ReadFrame(int fd) {
  Bytes frame(wire::kHeaderSize);
  if (!ReadFull(fd, frame)) return std::nullopt;
  wire::FrameHeader h =
      wire::DecodeHeader(std::span(frame).first<wire::kHeaderSize>());
  for (std::uint32_t i = 0; i < h.count; ++i) {
    std::uint8_t len_bytes[4];
    if (!ReadFull(fd, len_bytes)) {
      throw ProtocolError("connection closed mid-frame");
    }
    std::uint32_t len = (std::uint32_t{len_bytes[0]} << 24) |
                        (std::uint32_t{len_bytes[1]} << 16) |
                        (std::uint32_t{len_bytes[2]} << 8) |
                        std::uint32_t{len_bytes[3]};
    if (len > wire::kMaxIntegerBytes) {
      throw FormatError("payload integer exceeds frame limit");
    }
    frame.insert(frame.end(), std::begin(len_bytes), std::end(len_bytes));
    std::size_t at = frame.size();
    frame.resize(at + len);
    if (len > 0 && !ReadFull(fd, std::span(frame).subspan(at, len))) {
      throw ProtocolError("connection closed mid-frame");
    }
  }
  return frame;
}

void SetTimeouts(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

ProtocolMessage CheckResponse(const ProtocolMessage& request,
                              ProtocolMessage response) {
  if (response.session_id != request.session_id) {
    throw ProtocolError("response session id does not match request");
  }
  return response;
}

}  // namespace

Bytes HandleFrame(const RequestHandler& handler,
                  std::span<const std::uint8_t> frame, EntropySource& rng) {
  ProtocolMessage request;
  try {
    request = wire::DecodeFrame(frame);
  } catch (const std::exception&) {
    std::uint64_t sid = 0;
    if (frame.size() >= wire::kHeaderSize) {
      for (std::size_t i = 6; i < 14; ++i) sid = (sid << 8) | frame[i];
    }
    return wire::EncodeFrame(wire::MakeError(sid, ErrorCode::kMalformedFrame));
  }
  if (request.version != wire::kVersion) {
    return wire::EncodeFrame(
        wire::MakeError(request.session_id, ErrorCode::kVersionMismatch));
  }
  if (!wire::IsKnownType(static_cast<std::uint8_t>(request.type)) ||
      !wire::IsRequest(request.type)) {
    return wire::EncodeFrame(
        wire::MakeError(request.session_id, ErrorCode::kUnknownType));
  }
  try {
    ProtocolMessage response = handler.Handle(request, rng);
    response.session_id = request.session_id;
    return wire::EncodeFrame(response);
  } catch (const std::exception&) {
    return wire::EncodeFrame(
        wire::MakeError(request.session_id, ErrorCode::kInternal));
  }
}

// ------------------------------------------------------------- loopback

struct LoopbackState {
  std::mutex mu;
  const RequestHandler* handler = nullptr;
  std::unique_ptr<EntropySource> rng;
  bool closed = false;
};

LoopbackServer::LoopbackServer(std::shared_ptr<LoopbackState> state)
    : state_(std::move(state)) {}

LoopbackServer::~LoopbackServer() { Close(); }

void LoopbackServer::Serve(const RequestHandler& handler,
                           std::unique_ptr<EntropySource> rng) {
  std::lock_guard lock(state_->mu);
  state_->handler = &handler;
  state_->rng = std::move(rng);
}

void LoopbackServer::Close() {
  std::lock_guard lock(state_->mu);
  state_->closed = true;
  state_->handler = nullptr;
}

LoopbackClient::LoopbackClient(std::shared_ptr<LoopbackState> state)
    : state_(std::move(state)) {}

LoopbackClient::~LoopbackClient() { Close(); }

ProtocolMessage LoopbackClient::SendRequest(const ProtocolMessage& request) {
  Bytes frame = wire::EncodeFrame(request);
  Bytes reply;
  {
    std::lock_guard lock(state_->mu);
    if (state_->closed) throw ProtocolError("loopback link is closed");
    if (state_->handler == nullptr || !state_->rng) {
      throw ProtocolError("loopback server is not serving");
    }
    reply = HandleFrame(*state_->handler, frame, *state_->rng);
  }
  try {
    return CheckResponse(request, wire::DecodeFrame(reply));
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
}

void LoopbackClient::Close() {
  std::lock_guard lock(state_->mu);
  state_->closed = true;
}

LoopbackPair MakeLoopbackPair() {
  auto state = std::make_shared<LoopbackState>();
  return LoopbackPair{std::make_unique<LoopbackClient>(state),
                      std::make_unique<LoopbackServer>(state)};
}

// ------------------------------------------------------------------ TCP

Endpoint Endpoint::Parse(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 >= text.size()) {
    throw ProtocolError("address must look like host:port, got '" + text +
                        "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  if (ep.host.empty()) ep.host = "127.0.0.1";
  try {
    std::size_t used = 0;
    int port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port < 0 || port > 65535) {
      throw std::out_of_range("port");
    }
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw ProtocolError("invalid port in '" + text + "'");
  }
  return ep;
}

std::string Endpoint::ToString() const {
  return host + ":" + std::to_string(port);
}

std::unique_ptr<TcpChannel> TcpChannel::Connect(
    const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string port = std::to_string(endpoint.port);
  int rc = ::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) {
    throw ProtocolError("cannot resolve " + endpoint.ToString() + ": " +
                        ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res,
                                                             ::freeaddrinfo);
  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = ErrnoText("socket");
      continue;
    }
    SetTimeouts(fd, timeout);
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      return std::unique_ptr<TcpChannel>(new TcpChannel(fd));
    }
    last_error = ErrnoText("connect");
    ::close(fd);
  }
  throw ProtocolError("cannot connect to " + endpoint.ToString() + ": " +
                      last_error);
}

TcpChannel::~TcpChannel() { Close(); }

ProtocolMessage TcpChannel::SendRequest(const ProtocolMessage& request) {
  std::lock_guard lock(mu_);
  if (fd_ < 0) throw ProtocolError("channel is closed");
  WriteFull(fd_, wire::EncodeFrame(request));
  std::optional<Bytes> frame;
  try {
    frame = ReadFrame(fd_);
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
  if (!frame) throw ProtocolError("peer closed the connection");
  try {
    return CheckResponse(request, wire::DecodeFrame(*frame));
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
}

void TcpChannel::Close() {
  std::lock_guard lock(mu_);
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(const Endpoint& bind) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  std::string port = std::to_string(bind.port);
  const char* host = bind.host.empty() ? nullptr : bind.host.c_str();
  int rc = ::getaddrinfo(host, port.c_str(), &hints, &res);
  if (rc != 0) {
    throw ProtocolError("cannot resolve " + bind.ToString() + ": " +
                        ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res,
                                                             ::freeaddrinfo);
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 &&
        ::listen(fd, 64) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (fd_ < 0) throw ProtocolError(ErrnoText(("bind " + bind.ToString()).c_str()));
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

P2Server::P2Server(const RequestHandler& handler, TcpListener listener,
                   std::optional<std::uint64_t> seed)
    : handler_(handler), listener_(std::move(listener)), seed_(seed) {}

P2Server::~P2Server() {
  Stop();
  std::lock_guard lock(mu_);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
}

void P2Server::Stop() { stop_.store(true); }

void P2Server::Serve() {
  std::uint64_t next_index = 0;
  while (!stop_.load()) {
    pollfd pfd{listener_.fd(), POLLIN, 0};
    int rc = ::poll(&pfd, 1, kPollIntervalMs);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(ErrnoText("poll"));
    }
    if (rc == 0) continue;
    int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) continue;
    std::uint64_t index = next_index++;
    std::lock_guard lock(mu_);
    workers_.emplace_back([this, fd, index] { RunConnection(fd, index); });
  }
  std::lock_guard lock(mu_);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void P2Server::RunConnection(int fd, std::uint64_t index) {
  std::unique_ptr<EntropySource> rng;
  if (seed_) {
    rng = std::make_unique<SeededEntropy>(DeriveSeed(*seed_, index));
  } else {
    rng = std::make_unique<SystemEntropy>();
  }
  SetTimeouts(fd, kDefaultTimeout);
  while (!stop_.load()) {
    pollfd pfd{fd, POLLIN, 0};
    int rc = ::poll(&pfd, 1, kPollIntervalMs);
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    try {
      std::optional<Bytes> frame = ReadFrame(fd);
      if (!frame) break;
      Bytes reply = HandleFrame(handler_, *frame, *rng);
      requests_.fetch_add(1);
      WriteFull(fd, reply);
    } catch (const FormatError&) {
      // The stream cannot be re-synchronised after a bad header.
      try {
        WriteFull(fd, wire::EncodeFrame(
                          wire::MakeError(0, ErrorCode::kMalformedFrame)));
      } catch (const std::exception&) {
      }
      break;
    } catch (const std::exception&) {
      break;
    }
  }
  ::close(fd);
}

}  // namespace smlp::transport
