#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>

#include "afc/broker/net.hpp"
#include "afc/broker/wire.hpp"

namespace afc::broker {

/// Thread-safe key -> tensor map with a byte budget (key bytes plus payload
/// bytes). Values are immutable once stored, so readers share them without
/// copying and never see a partial write.
class Store {
public:
    explicit Store(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {}

    /// False when the store would exceed capacity; the old value is kept.
    bool put(const std::string& key, Tensor value);
    /// Blocks until the key exists, the deadline passes, or close() is called.
    std::shared_ptr<const Tensor> get(const std::string& key, std::chrono::milliseconds timeout);
    /// A key ending in '*' removes every key with that prefix.
    std::size_t erase(const std::string& key);
    void close();

    std::uint64_t used_bytes() const;
    std::size_t size() const;
    std::uint64_t capacity() const { return capacity_; }

private:
    static std::uint64_t cost(const std::string& key, const Tensor& t) { return key.size() + t.data.size(); }

    const std::uint64_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable changed_;
    std::unordered_map<std::string, std::shared_ptr<const Tensor>> map_;
    std::uint64_t used_ = 0;
    bool closed_ = false;
};

/// TCP front end for a Store: one thread per connection. Protocol
/// violations get an ERR frame and the connection is closed.
class Server {
public:
    Server(const std::string& address, std::uint64_t capacity_bytes);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return port_; }
    std::string address() const;
    Store& store() { return store_; }
    /// Blocks until stop() is called from another thread or a signal handler path.
    void wait();
    void stop();

private:
    struct Connection {
        Socket socket;
        std::thread thread;
        std::atomic<bool> done{false};
    };

    void accept_loop();
    void serve(Connection& c);
    void reap(bool all);

    Store store_;
    Endpoint endpoint_;
    Socket listener_;
    std::uint16_t port_ = 0;
    std::thread acceptor_;
    std::mutex conn_mutex_;
    std::list<Connection> connections_;
    std::atomic<bool> stopping_{false};
    std::mutex stop_mutex_;
    std::condition_variable stopped_;
    bool stopped_flag_ = false;
};

}  // namespace afc::broker
