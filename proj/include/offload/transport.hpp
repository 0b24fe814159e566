#ifndef OFFLOAD_TRANSPORT_HPP_
#define OFFLOAD_TRANSPORT_HPP_

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "offload/common.hpp"

namespace offload::transport {

// Frame-oriented duplex channel. Safe for one concurrent writer and one
// concurrent reader. send_frame/recv_frame throw ConnectionLost when the
// peer is gone.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send_frame(const Bytes& frame) = 0;
  virtual Bytes recv_frame() = 0;
  virtual void close() = 0;
};

// One direction of an in-memory pipe.
struct PipeQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> frames;
  bool closed = false;

  void push(Bytes f) {
    {
      std::lock_guard lock(mu);
      if (closed) throw ConnectionLost("pipe closed");
      frames.push_back(std::move(f));
    }
    cv.notify_one();
  }

  Bytes pop() {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !frames.empty() || closed; });
    if (frames.empty()) throw ConnectionLost("pipe closed");
    Bytes f = std::move(frames.front());
    frames.pop_front();
    return f;
  }

  void close_queue() {
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

// In-memory transport pair backed by two queues; used by in-process clients
// and by threaded tests.
class PipeTransport final : public Transport {
 public:
  PipeTransport(std::shared_ptr<PipeQueue> out, std::shared_ptr<PipeQueue> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  static std::pair<std::unique_ptr<PipeTransport>, std::unique_ptr<PipeTransport>>
  make_pair() {
    auto a = std::make_shared<PipeQueue>();
    auto b = std::make_shared<PipeQueue>();
    return {std::make_unique<PipeTransport>(a, b),
            std::make_unique<PipeTransport>(b, a)};
  }

  void send_frame(const Bytes& frame) override { out_->push(frame); }
  Bytes recv_frame() override { return in_->pop(); }
  void close() override {
    out_->close_queue();
    in_->close_queue();
  }

 private:
  std::shared_ptr<PipeQueue> out_;
  std::shared_ptr<PipeQueue> in_;
};

// Synchronous in-process transport: send_frame hands the frame to a handler
// that returns the response frames immediately. This is the deterministic-mode
// path; no threads, so virtual time stays exact.
class InProcessTransport final : public Transport {
 public:
  using Handler = std::function<std::vector<Bytes>(const Bytes&)>;

  explicit InProcessTransport(Handler handler) : handler_(std::move(handler)) {}

  void send_frame(const Bytes& frame) override {
    if (closed_) throw ConnectionLost("transport closed");
    auto replies = handler_(frame);
    for (auto& r : replies) inbox_.push_back(std::move(r));
  }

  Bytes recv_frame() override {
    if (closed_) throw ConnectionLost("transport closed");
    if (inbox_.empty()) throw ConnectionLost("no response pending");
    Bytes f = std::move(inbox_.front());
    inbox_.pop_front();
    return f;
  }

  void close() override { closed_ = true; }

 private:
  Handler handler_;
  std::deque<Bytes> inbox_;
  bool closed_ = false;
};

// TCP transport; frames are written as-is (they already carry the 4-byte
// length prefix) and reassembled on read.
class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {}
  ~TcpTransport() override { close(); }

  static std::unique_ptr<TcpTransport> connect(const std::string& host, int port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw ConnectionLost("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      ::close(fd);
      throw ConnectionLost("bad address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd);
      throw ConnectionLost("connect failed to " + host + ":" + std::to_string(port));
    }
    return std::make_unique<TcpTransport>(fd);
  }

  void send_frame(const Bytes& frame) override {
    std::size_t sent = 0;
    while (sent < frame.size()) {
      ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) throw ConnectionLost("send failed");
      sent += static_cast<std::size_t>(n);
    }
  }

  Bytes recv_frame() override {
    Bytes len_buf = read_exact(4);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | len_buf[i];
    Bytes body = read_exact(len);
    Bytes frame = std::move(len_buf);
    frame.insert(frame.end(), body.begin(), body.end());
    return frame;
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  Bytes read_exact(std::size_t n) {
    Bytes buf(n);
    std::size_t got = 0;
    while (got < n) {
      ssize_t r = ::recv(fd_, buf.data() + got, n - got, 0);
      if (r <= 0) throw ConnectionLost("connection closed by peer");
      got += static_cast<std::size_t>(r);
    }
    return buf;
  }

  int fd_ = -1;
};

class TcpListener {
 public:
  explicit TcpListener(int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw InputError("socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      ::close(fd_);
      throw InputError("bind failed on port " + std::to_string(port));
    }
    if (::listen(fd_, 16) != 0) {
      ::close(fd_);
      throw InputError("listen failed");
    }
  }

  ~TcpListener() { close(); }

  int port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  std::unique_ptr<TcpTransport> accept() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) throw ConnectionLost("accept failed");
    return std::make_unique<TcpTransport>(fd);
  }

  void close() {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
};

}  // namespace offload::transport

#endif  // OFFLOAD_TRANSPORT_HPP_
