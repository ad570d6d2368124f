#pragma once

// Transports for the framed protocol: an in-memory duplex pipe for tests and
// a minimal blocking TCP wrapper (POSIX) for the CLI. Both expose the same
// surface: send_bytes / read_some (the ByteSource the deframer consumes).

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include "ecid/wire.hpp"

namespace ecid {

// ---------------------------------------------------------------------------
// In-memory duplex pipe (two endpoints, each reading the other's writes).

namespace detail {
struct ByteQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::uint8_t> data;
    bool closed = false;

    void push(std::span<const std::uint8_t> bytes) {
        {
            std::lock_guard lock(mu);
            data.insert(data.end(), bytes.begin(), bytes.end());
        }
        cv.notify_all();
    }
    std::size_t pop_some(std::span<std::uint8_t> out, int timeout_ms) {
        std::unique_lock lock(mu);
        if (timeout_ms >= 0) {
            if (!cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                             [&] { return !data.empty() || closed; }))
                throw WireError(WireCode::timeout, "transport read timed out");
        } else {
            cv.wait(lock, [&] { return !data.empty() || closed; });
        }
        if (data.empty()) return 0;  // closed
        std::size_t n = std::min(out.size(), data.size());
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = data.front();
            data.pop_front();
        }
        return n;
    }
    void close() {
        {
            std::lock_guard lock(mu);
            closed = true;
        }
        cv.notify_all();
    }
};
}  // namespace detail

class PipeEnd final : public ByteSource {
public:
    PipeEnd(std::shared_ptr<detail::ByteQueue> in, std::shared_ptr<detail::ByteQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}
    ~PipeEnd() override {
        if (out_) out_->close();
    }

    void send_bytes(std::span<const std::uint8_t> bytes) { out_->push(bytes); }
    std::size_t read_some(std::span<std::uint8_t> out) override {
        return in_->pop_some(out, timeout_ms_);
    }
    void set_timeout_ms(int ms) { timeout_ms_ = ms; }
    void close() { out_->close(); }

private:
    std::shared_ptr<detail::ByteQueue> in_, out_;
    int timeout_ms_ = -1;
};

inline std::pair<std::unique_ptr<PipeEnd>, std::unique_ptr<PipeEnd>> make_pipe_pair() {
    auto a = std::make_shared<detail::ByteQueue>();
    auto b = std::make_shared<detail::ByteQueue>();
    return {std::make_unique<PipeEnd>(a, b), std::make_unique<PipeEnd>(b, a)};
}

// ---------------------------------------------------------------------------
// TCP.

class TcpStream final : public ByteSource {
public:
    explicit TcpStream(int fd) : fd_(fd) {}
    TcpStream(TcpStream&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    TcpStream& operator=(TcpStream&& o) noexcept {
        if (this != &o) {
            close_fd();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    ~TcpStream() override { close_fd(); }

    static TcpStream connect(const std::string& host, std::uint16_t port, int timeout_ms = 10000) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw WireError(WireCode::internal, "socket() failed");
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            throw ConfigError("bad address: " + host);
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            ::close(fd);
            throw WireError(WireCode::internal, "connect() failed: " + std::string(strerror(errno)));
        }
        TcpStream s(fd);
        s.set_timeout_ms(timeout_ms);
        return s;
    }

    void set_timeout_ms(int ms) {
        timeval tv{};
        tv.tv_sec = ms / 1000;
        tv.tv_usec = (ms % 1000) * 1000;
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    }

    void send_bytes(std::span<const std::uint8_t> bytes) {
        std::size_t sent = 0;
        while (sent < bytes.size()) {
            ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) throw WireError(WireCode::internal, "send() failed");
            sent += static_cast<std::size_t>(n);
        }
    }

    std::size_t read_some(std::span<std::uint8_t> out) override {
        ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw WireError(WireCode::timeout, "transport read timed out");
            throw WireError(WireCode::internal, "recv() failed");
        }
        return static_cast<std::size_t>(n);
    }

private:
    void close_fd() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int fd_ = -1;
};

class TcpListener {
public:
    // Binds host:port; port 0 picks an ephemeral port (see bound_port()).
    TcpListener(const std::string& host, std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw WireError(WireCode::internal, "socket() failed");
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd_);
            throw ConfigError("bad listen address: " + host);
        }
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            ::close(fd_);
            throw ConfigError("bind failed: " + std::string(strerror(errno)));
        }
        if (::listen(fd_, 16) != 0) {
            ::close(fd_);
            throw WireError(WireCode::internal, "listen() failed");
        }
        sockaddr_in got{};
        socklen_t len = sizeof(got);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&got), &len);
        port_ = ntohs(got.sin_port);
    }
    ~TcpListener() {
        if (fd_ >= 0) ::close(fd_);
    }
    TcpListener(const TcpListener&) = delete;

    std::uint16_t bound_port() const { return port_; }

    TcpStream accept() {
        int cfd = ::accept(fd_, nullptr, nullptr);
        if (cfd < 0) throw WireError(WireCode::internal, "accept() failed");
        return TcpStream(cfd);
    }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// host:port splitter for CLI addresses.
inline std::pair<std::string, std::uint16_t> parse_address(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ConfigError("address must be host:port");
    std::string host = addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad port in address: " + addr);
    }
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    return {host.empty() ? std::string("127.0.0.1") : host, static_cast<std::uint16_t>(port)};
}

}  // namespace ecid
