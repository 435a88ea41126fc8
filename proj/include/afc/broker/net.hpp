#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace afc::broker {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

/// "HOST:PORT"; throws ConfigError naming the address when malformed.
Endpoint parse_endpoint(const std::string& address);

/// Owning socket descriptor with exact-length blocking I/O. Read and write
/// failures throw TransportError.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    static Socket connect(const Endpoint& ep);
    /// Binds and listens; port 0 picks an ephemeral port.
    static Socket listen(const Endpoint& ep, int backlog = 128);

    Socket accept() const;
    void read_exact(std::span<std::uint8_t> out) const;
    void write_all(std::span<const std::uint8_t> data) const;
    /// Wakes any thread blocked on this socket.
    void shutdown() const;
    void close();

    std::uint16_t local_port() const;
    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

private:
    int fd_ = -1;
};

}  // namespace afc::broker
