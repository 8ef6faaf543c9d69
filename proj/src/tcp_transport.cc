/*
 * Copyright 2026 The FedST Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <thread>

#include "fedst/transport.h"

namespace fedst {
namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

bool write_all(int fd, const uint8_t* data, size_t len) {
  while (len > 0) {
    ssize_t w = ::send(fd, data, len, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += w;
    len -= static_cast<size_t>(w);
  }
  return true;
}

bool read_all(int fd, uint8_t* data, size_t len) {
  while (len > 0) {
    ssize_t r = ::recv(fd, data, len, 0);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += r;
    len -= static_cast<size_t>(r);
  }
  return true;
}

sockaddr_in resolve(const Endpoint& e) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(e.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw std::runtime_error("cannot resolve host " + e.host);
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  freeaddrinfo(res);
  addr.sin_port = htons(e.port);
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

class TcpTransport : public Transport {
 public:
  TcpTransport(int id, std::vector<int> fds) : id_(id), n_(static_cast<int>(fds.size())), fds_(std::move(fds)) {
    inbox_.resize(n_);
    for (int p = 0; p < n_; ++p) {
      inbox_[p] = std::make_unique<FrameQueue>();
      if (p != id_) readers_.emplace_back([this, p] { read_loop(p); });
    }
  }

  ~TcpTransport() override {
    close();
    for (auto& t : readers_) t.join();
    for (int fd : fds_) {
      if (fd >= 0) ::close(fd);
    }
  }

  int id() const override { return id_; }
  int parties() const override { return n_; }

  void send(int to, Frame frame) override {
    auto header = encode_frame_header(frame);
    int fd = fds_.at(to);
    if (fd < 0 || !write_all(fd, header.data(), header.size()) ||
        !write_all(fd, frame.payload.data(), frame.payload.size())) {
      throw ChannelClosed("tcp send to party " + std::to_string(to) + " failed");
    }
  }

  Frame recv(int from) override { return inbox_.at(from)->pop(); }

  void close() override {
    bool expected = false;
    if (!closed_.compare_exchange_strong(expected, true)) return;
    for (int fd : fds_) {
      if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& q : inbox_) q->close();
  }

 private:
  void read_loop(int peer) {
    int fd = fds_[peer];
    for (;;) {
      uint8_t header[kFrameHeaderBytes];
      if (!read_all(fd, header, sizeof header)) break;
      uint32_t len = (uint32_t{header[0]} << 24) | (uint32_t{header[1]} << 16) |
                     (uint32_t{header[2]} << 8) | header[3];
      Frame f;
      f.stage = static_cast<Stage>(header[4]);
      f.payload.resize(len);
      if (!read_all(fd, f.payload.data(), len)) break;
      try {
        inbox_[peer]->push(std::move(f));
      } catch (const ChannelClosed&) {
        break;
      }
    }
    inbox_[peer]->close();
  }

  int id_;
  int n_;
  std::vector<int> fds_;
  std::vector<std::unique_ptr<FrameQueue>> inbox_;
  std::vector<std::thread> readers_;
  std::atomic<bool> closed_{false};
};

}  // namespace

std::unique_ptr<Transport> connect_tcp(int id, const std::vector<Endpoint>& endpoints,
                                       std::chrono::milliseconds timeout) {
  const int n = static_cast<int>(endpoints.size());
  if (id < 0 || id >= n) throw std::out_of_range("connect_tcp: party id");
  const auto deadline = Clock::now() + timeout;
  std::vector<int> fds(n, -1);
  auto cleanup = [&](int listen_fd) {
    if (listen_fd >= 0) ::close(listen_fd);
    for (int fd : fds) {
      if (fd >= 0) ::close(fd);
    }
  };

  int lfd = -1;
  if (id < n - 1) {
    lfd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (lfd < 0) throw_errno("socket");
    int one = 1;
    setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(endpoints[id]);
    if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(lfd, n) < 0) {
      int err = errno;
      cleanup(lfd);
      errno = err;
      throw_errno("listen on port " + std::to_string(endpoints[id].port));
    }
  }

  for (int j = 0; j < id; ++j) {
    sockaddr_in addr = resolve(endpoints[j]);
    for (;;) {
      int fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd < 0) throw_errno("socket");
      if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
        fds[j] = fd;
        break;
      }
      ::close(fd);
      if (Clock::now() > deadline) {
        cleanup(lfd);
        throw std::runtime_error("connection timeout to party " + std::to_string(j));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    set_nodelay(fds[j]);
    uint8_t hello[4] = {static_cast<uint8_t>(id >> 24), static_cast<uint8_t>(id >> 16),
                        static_cast<uint8_t>(id >> 8), static_cast<uint8_t>(id)};
    if (!write_all(fds[j], hello, sizeof hello)) {
      cleanup(lfd);
      throw std::runtime_error("handshake with party " + std::to_string(j) + " failed");
    }
  }

  for (int accepted = 0; accepted < n - 1 - id; ++accepted) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    pollfd pfd{lfd, POLLIN, 0};
    if (left.count() <= 0 || ::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) {
      cleanup(lfd);
      throw std::runtime_error("connection timeout waiting for peers");
    }
    int fd = ::accept(lfd, nullptr, nullptr);
    if (fd < 0) {
      cleanup(lfd);
      throw_errno("accept");
    }
    uint8_t hello[4];
    if (!read_all(fd, hello, sizeof hello)) {
      ::close(fd);
      cleanup(lfd);
      throw std::runtime_error("handshake read failed");
    }
    int peer = (hello[0] << 24) | (hello[1] << 16) | (hello[2] << 8) | hello[3];
    if (peer <= id || peer >= n || fds[peer] >= 0) {
      ::close(fd);
      cleanup(lfd);
      throw std::runtime_error("unexpected or duplicate party id " + std::to_string(peer));
    }
    set_nodelay(fd);
    fds[peer] = fd;
  }
  if (lfd >= 0) ::close(lfd);
  return std::make_unique<TcpTransport>(id, std::move(fds));
}

}  // namespace fedst
