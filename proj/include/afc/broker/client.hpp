#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "afc/broker/net.hpp"
#include "afc/broker/wire.hpp"

namespace afc::broker {

/// The broker answered ERR (capacity exhausted, malformed request). Not retryable.
class BrokerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t default_get_timeout_ms = 60000;

/// Blocking single-connection client. Not safe for concurrent use from two
/// threads; give each thread its own client.
class Client {
public:
    /// Retries the connection until `connect_timeout_ms` elapses.
    explicit Client(const std::string& address, std::uint32_t connect_timeout_ms = 0);

    void put(const std::string& key, const Tensor& tensor);
    /// nullopt on NOT_FOUND after the timeout.
    std::optional<Tensor> get(const std::string& key, std::uint32_t timeout_ms = default_get_timeout_ms);
    void del(const std::string& key);
    void ping();

    void put_f64(const std::string& key, std::span<const double> values) { put(key, Tensor::from_f64(values)); }
    std::optional<std::vector<double>> get_f64(const std::string& key,
                                               std::uint32_t timeout_ms = default_get_timeout_ms);

    /// Raw request/response exchange, for protocol tests.
    Frame roundtrip(const Frame& request);

private:
    Socket socket_;
};

}  // namespace afc::broker
