/*
 * Copyright 2026 The tilesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file channel.hpp
 * @brief Ordered byte streams between the simulator and a host session.
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace tilesim::daemon {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConnectionRefused : public TransportError {
 public:
  using TransportError::TransportError;
};

class HandshakeTimeout : public TransportError {
 public:
  using TransportError::TransportError;
};

class ChannelClosed : public TransportError {
 public:
  ChannelClosed() : TransportError("channel closed by peer") {}
};

class ByteChannel {
 public:
  virtual ~ByteChannel() = default;

  /// Writes everything or throws ChannelClosed / TransportError.
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  /// nullopt on timeout, 0 at end of stream, otherwise the bytes read.
  virtual std::optional<std::size_t> read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) = 0;
  /// Ends our sending direction; the peer reads end of stream once drained.
  virtual void close() = 0;
};

class TcpChannel final : public ByteChannel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  /// Throws ConnectionRefused, HandshakeTimeout or TransportError.
  static std::unique_ptr<TcpChannel> connect(const std::string& host, std::uint16_t port,
                                             std::chrono::milliseconds timeout = std::chrono::seconds(5));

  void write(std::span<const std::uint8_t> bytes) override;
  std::optional<std::size_t> read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  int fd_;
  bool write_closed_ = false;
};

class TcpListener {
 public:
  /// Port 0 picks a free port. Throws TransportError (e.g. port in use).
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// nullopt on timeout.
  std::unique_ptr<TcpChannel> accept(std::optional<std::chrono::milliseconds> timeout = std::nullopt);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Two in-process channel ends connected back to back.
std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_loopback_pair();

/// Splits "host:port"; throws std::invalid_argument.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& spec);

}  // namespace tilesim::daemon
