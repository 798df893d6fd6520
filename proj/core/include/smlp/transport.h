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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smlp/entropy.h"
#include "smlp/wire.h"

namespace smlp::transport {

using wire::ProtocolMessage;

inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

// P1's end of the link to P2.
class Channel {
 public:
  virtual ~Channel() = default;

  // Blocking request/response. The response carries the request's session
  // id; it may be an ERR frame. Throws ProtocolError on transport failure,
  // timeout, malformed frames or use after Close().
  virtual ProtocolMessage SendRequest(const ProtocolMessage& request) = 0;
  virtual void Close() = 0;
};

// P2's request logic. Implementations must be safe to call concurrently
// from several connections; `rng` belongs to the calling connection.
class RequestHandler {
 public:
  virtual ~RequestHandler() = default;
  virtual ProtocolMessage Handle(const ProtocolMessage& request,
                                 EntropySource& rng) const = 0;
};

// Decodes one request frame, dispatches it and encodes the reply. Never
// throws: malformed frames, unknown types, version mismatches and handler
// failures all become ERR frames.
Bytes HandleFrame(const RequestHandler& handler,
                  std::span<const std::uint8_t> frame, EntropySource& rng);

// ------------------------------------------------------------- loopback

struct LoopbackState;

class LoopbackServer {
 public:
  explicit LoopbackServer(std::shared_ptr<LoopbackState> state);
  ~LoopbackServer();
  LoopbackServer(const LoopbackServer&) = delete;
  LoopbackServer& operator=(const LoopbackServer&) = delete;

  // Attaches `handler` (which must outlive the link) and the connection's
  // entropy source. Requests sent before this fail.
  void Serve(const RequestHandler& handler,
             std::unique_ptr<EntropySource> rng);
  void Close();

 private:
  std::shared_ptr<LoopbackState> state_;
};

class LoopbackClient final : public Channel {
 public:
  explicit LoopbackClient(std::shared_ptr<LoopbackState> state);
  ~LoopbackClient() override;

  ProtocolMessage SendRequest(const ProtocolMessage& request) override;
  void Close() override;

 private:
  std::shared_ptr<LoopbackState> state_;
};

// In-process link. Requests are serialized to frames and parsed on the
// other side exactly as over a socket.
struct LoopbackPair {
  std::unique_ptr<LoopbackClient> client;
  std::unique_ptr<LoopbackServer> server;
};
LoopbackPair MakeLoopbackPair();

// ------------------------------------------------------------------ TCP

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port"; throws ProtocolError on malformed input.
  static Endpoint Parse(const std::string& text);
  std::string ToString() const;
};

class TcpChannel final : public Channel {
 public:
  static std::unique_ptr<TcpChannel> Connect(
      const Endpoint& endpoint,
      std::chrono::milliseconds timeout = kDefaultTimeout);
  ~TcpChannel() override;

  ProtocolMessage SendRequest(const ProtocolMessage& request) override;
  void Close() override;

 private:
  explicit TcpChannel(int fd) : fd_(fd) {}
  int fd_;
  std::mutex mu_;
};

class TcpListener {
 public:
  // Port 0 binds an ephemeral port; see port().
  explicit TcpListener(const Endpoint& bind);
  ~TcpListener();
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&&) = delete;
  TcpListener(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Multi-connection service loop for P2. Each accepted connection runs on
// its own thread with its own entropy source; the handler is shared.
class P2Server {
 public:
  // With `seed`, connection i draws from SeededEntropy(DeriveSeed(seed, i)).
  P2Server(const RequestHandler& handler, TcpListener listener,
           std::optional<std::uint64_t> seed = std::nullopt);
  ~P2Server();

  // Blocks until Stop() is called, then joins all connection threads.
  void Serve();
  // Safe to call from any thread.
  void Stop();

  std::uint16_t port() const { return listener_.port(); }
  std::uint64_t requests_served() const { return requests_.load(); }

 private:
  void RunConnection(int fd, std::uint64_t index);

  const RequestHandler& handler_;
  TcpListener listener_;
  std::optional<std::uint64_t> seed_;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> requests_{0};
  std::mutex mu_;
  std::vector<std::thread> workers_;
};

}  // namespace smlp::transport
