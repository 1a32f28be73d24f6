#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/transport.hpp"

namespace tframe {

namespace detail {

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close_fd();
      fd_ = o.fd_;
      o.fd_ = -1;
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close_fd(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }

  void write_all(const std::uint8_t* data, std::size_t n) const {
    while (n > 0) {
      const ssize_t w = ::send(fd_, data, n, MSG_NOSIGNAL);
      if (w <= 0) throw TransportError("tcp: connection lost while sending");
      data += w;
      n -= static_cast<std::size_t>(w);
    }
  }

  void read_all(std::uint8_t* data, std::size_t n) const {
    while (n > 0) {
      const ssize_t r = ::recv(fd_, data, n, 0);
      if (r <= 0) throw TransportError("tcp: connection lost while receiving");
      data += r;
      n -= static_cast<std::size_t>(r);
    }
  }

 private:
  void close_fd() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int fd_ = -1;
};

inline std::pair<std::string, std::uint16_t> split_host_port(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("address '" + addr + "' is not host:port");
  const int port = std::stoi(addr.substr(colon + 1));
  if (port < 1 || port > 65535) throw std::invalid_argument("bad port in '" + addr + "'");
  return {addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

inline sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(port);
  if (host.empty() || host == "*") {
    sa.sin_addr.s_addr = htonl(INADDR_ANY);
    return sa;
  }
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    throw TransportError("tcp: cannot resolve host '" + host + "'");
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

// Reads one protocol frame from the socket, validating the header before
// trusting the length field.
inline Frame read_frame(const Socket& sock) {
  Frame frame(kFrameHeaderSize);
  sock.read_all(frame.data(), kFrameHeaderSize);
  if (std::memcmp(frame.data(), kMagic, 4) != 0)
    throw ProtocolError("tcp: bad magic on stream");
  if (frame[4] != kProtocolVersion)
    throw ProtocolError("tcp: unsupported protocol version " + std::to_string(frame[4]));
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = len << 8 | frame[6 + i];
  frame.resize(kFrameHeaderSize + len);
  sock.read_all(frame.data() + kFrameHeaderSize, len);
  return frame;
}

inline void handshake_server(const Socket& sock) {
  std::uint8_t v = 0;
  sock.read_all(&v, 1);
  if (v != kProtocolVersion)
    throw TransportError("tcp: worker protocol version " + std::to_string(v) +
                         ", expected " + std::to_string(kProtocolVersion));
  const std::uint8_t mine = kProtocolVersion;
  sock.write_all(&mine, 1);
}

inline void handshake_client(const Socket& sock) {
  const std::uint8_t mine = kProtocolVersion;
  sock.write_all(&mine, 1);
  std::uint8_t v = 0;
  sock.read_all(&v, 1);
  if (v != kProtocolVersion)
    throw TransportError("tcp: master protocol version " + std::to_string(v) +
                         ", expected " + std::to_string(kProtocolVersion));
}

}  // namespace detail

/// Master side: listens, accepts the expected number of workers, exchanges a
/// version byte with each, then serves the Transport contract. One reader
/// thread per connection funnels frames into the receive queue.
class TcpMasterTransport final : public Transport {
 public:
  TcpMasterTransport(const std::string& listen_addr, std::size_t expect_workers) {
    if (expect_workers < 1)
      throw std::invalid_argument("TcpMasterTransport: need at least one worker");
    auto [host, port] = detail::split_host_port(listen_addr);
    detail::Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener.valid()) throw TransportError("tcp: cannot create socket");
    const int one = 1;
    ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = detail::resolve(host, port);
    if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0)
      throw TransportError("tcp: cannot bind " + listen_addr);
    if (::listen(listener.fd(), static_cast<int>(expect_workers)) != 0)
      throw TransportError("tcp: listen failed on " + listen_addr);
    for (std::size_t i = 0; i < expect_workers; ++i) {
      detail::Socket conn(::accept(listener.fd(), nullptr, nullptr));
      if (!conn.valid()) throw TransportError("tcp: accept failed");
      detail::handshake_server(conn);
      workers_.push_back(std::make_unique<Connection>(std::move(conn)));
    }
    for (std::size_t i = 0; i < workers_.size(); ++i)
      readers_.emplace_back([this, i] { reader_loop(i); });
  }

  ~TcpMasterTransport() override {
    for (auto& w : workers_) *w = Connection{};  // close sockets, unblocks readers
    for (auto& t : readers_) t.join();
  }

  std::size_t worker_count() const override { return workers_.size(); }

  void send_to(std::size_t worker, Frame frame) override {
    Connection& c = *workers_.at(worker);
    std::lock_guard lock(c.write_mu);
    c.sock.write_all(frame.data(), frame.size());
  }

  std::pair<std::size_t, Frame> receive_any() override {
    auto item = incoming_.pop();
    if (item.second.empty())
      throw TransportError("tcp: worker " + std::to_string(item.first) + " disconnected");
    return item;
  }

 private:
  struct Connection {
    Connection() = default;
    explicit Connection(detail::Socket s) : sock(std::move(s)) {}
    Connection& operator=(Connection&& o) noexcept {
      sock = std::move(o.sock);
      return *this;
    }
    detail::Socket sock;
    std::mutex write_mu;
  };

  void reader_loop(std::size_t worker) {
    try {
      for (;;) incoming_.push({worker, detail::read_frame(workers_[worker]->sock)});
    } catch (const Error&) {
      incoming_.push({worker, Frame{}});  // empty frame = connection gone
    }
  }

  std::vector<std::unique_ptr<Connection>> workers_;
  std::vector<std::thread> readers_;
  detail::BlockingQueue<std::pair<std::size_t, Frame>> incoming_;
};

/// Worker side: connects, exchanges the version byte, then exposes the frame
/// stream as a WorkerEndpoint.
class TcpWorkerEndpoint final : public WorkerEndpoint {
 public:
  explicit TcpWorkerEndpoint(const std::string& connect_addr) {
    auto [host, port] = detail::split_host_port(connect_addr);
    sock_ = detail::Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock_.valid()) throw TransportError("tcp: cannot create socket");
    sockaddr_in sa = detail::resolve(host, port);
    if (::connect(sock_.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0)
      throw TransportError("tcp: cannot connect to " + connect_addr);
    detail::handshake_client(sock_);
  }

  void send(Frame frame) override { sock_.write_all(frame.data(), frame.size()); }
  Frame receive() override { return detail::read_frame(sock_); }

 private:
  detail::Socket sock_;
};

}  // namespace tframe
