#include "afc/broker/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "afc/errors.hpp"

namespace afc::broker {

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) freeaddrinfo(head);
    }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    const std::string port = std::to_string(ep.port);
    const int rc = getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &out.head);
    if (rc != 0) throw TransportError("cannot resolve " + ep.host + ": " + gai_strerror(rc));
}

void no_delay(int fd) {
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

Endpoint parse_endpoint(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size()) {
        throw ConfigError("broker address '" + address + "' is not HOST:PORT");
    }
    Endpoint ep;
    ep.host = address.substr(0, colon);
    if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') {
        ep.host = ep.host.substr(1, ep.host.size() - 2);
    }
    unsigned port = 0;
    const char* first = address.data() + colon + 1;
    const char* last = address.data() + address.size();
    auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc() || ptr != last || port > 65535) {
        throw ConfigError("broker address '" + address + "' has an invalid port");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

Socket& Socket::operator=(Socket&& o) noexcept {
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

Socket Socket::connect(const Endpoint& ep) {
    AddrInfo ai;
    resolve(ep, false, ai);
    std::string last = "no address";
    for (addrinfo* a = ai.head; a; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
        if (!s.valid()) continue;
        if (::connect(s.fd_, a->ai_addr, a->ai_addrlen) == 0) {
            no_delay(s.fd_);
            return s;
        }
        last = std::strerror(errno);
    }
    throw TransportError("cannot connect to " + ep.host + ":" + std::to_string(ep.port) + ": " + last);
}

Socket Socket::listen(const Endpoint& ep, int backlog) {
    AddrInfo ai;
    resolve(ep, true, ai);
    std::string last = "no address";
    for (addrinfo* a = ai.head; a; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
        if (!s.valid()) continue;
        int one = 1;
        setsockopt(s.fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(s.fd_, a->ai_addr, a->ai_addrlen) == 0 && ::listen(s.fd_, backlog) == 0) return s;
        last = std::strerror(errno);
    }
    throw TransportError("cannot bind " + ep.host + ":" + std::to_string(ep.port) + ": " + last);
}

Socket Socket::accept() const {
    for (;;) {
        const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd >= 0) {
            no_delay(fd);
            return Socket(fd);
        }
        if (errno != EINTR) throw TransportError(sys_error("accept"));
    }
}

void Socket::read_exact(std::span<std::uint8_t> out) const {
    std::size_t got = 0;
    while (got < out.size()) {
        const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
        if (n > 0) {
            got += static_cast<std::size_t>(n);
        } else if (n == 0) {
            throw TransportError("connection closed by peer");
        } else if (errno != EINTR) {
            throw TransportError(sys_error("recv"));
        }
    }
}

void Socket::write_all(std::span<const std::uint8_t> data) const {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n >= 0) {
            sent += static_cast<std::size_t>(n);
        } else if (errno != EINTR) {
            throw TransportError(sys_error("send"));
        }
    }
}

void Socket::shutdown() const {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::uint16_t Socket::local_port() const {
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw TransportError(sys_error("getsockname"));
    if (addr.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
}

}  // namespace afc::broker
