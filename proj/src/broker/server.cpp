#include "afc/broker/server.hpp"

#include <vector>

#include "afc/errors.hpp"
#include "afc/log.hpp"

namespace afc::broker {

bool Store::put(const std::string& key, Tensor value) {
    auto v = std::make_shared<const Tensor>(std::move(value));
    std::lock_guard lock(mutex_);
    auto it = map_.find(key);
    const std::uint64_t old = it == map_.end() ? 0 : cost(key, *it->second);
    const std::uint64_t next = used_ - old + cost(key, *v);
    if (next > capacity_) return false;
    used_ = next;
    if (it == map_.end()) {
        map_.emplace(key, std::move(v));
    } else {
        it->second = std::move(v);
    }
    changed_.notify_all();
    return true;
}

std::shared_ptr<const Tensor> Store::get(const std::string& key, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::unique_lock lock(mutex_);
    for (;;) {
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        if (closed_) return nullptr;
        if (changed_.wait_until(lock, deadline) == std::cv_status::timeout) {
            it = map_.find(key);
            return it == map_.end() ? nullptr : it->second;
        }
    }
}

std::size_t Store::erase(const std::string& key) {
    std::lock_guard lock(mutex_);
    if (!key.empty() && key.back() == '*') {
        const std::string_view prefix(key.data(), key.size() - 1);
        std::size_t n = 0;
        for (auto it = map_.begin(); it != map_.end();) {
            if (std::string_view(it->first).starts_with(prefix)) {
                used_ -= cost(it->first, *it->second);
                it = map_.erase(it);
                ++n;
            } else {
                ++it;
            }
        }
        return n;
    }
    auto it = map_.find(key);
    if (it == map_.end()) return 0;
    used_ -= cost(key, *it->second);
    map_.erase(it);
    return 1;
}

void Store::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    changed_.notify_all();
}

std::uint64_t Store::used_bytes() const {
    std::lock_guard lock(mutex_);
    return used_;
}

std::size_t Store::size() const {
    std::lock_guard lock(mutex_);
    return map_.size();
}

Server::Server(const std::string& address, std::uint64_t capacity_bytes)
    : store_(capacity_bytes), endpoint_(parse_endpoint(address)) {
    listener_ = Socket::listen(endpoint_);
    port_ = listener_.local_port();
    acceptor_ = std::thread([this] { accept_loop(); });
    log::info("broker listening on " + this->address());
}

Server::~Server() { stop(); }

std::string Server::address() const {
    const std::string host = endpoint_.host.empty() ? "0.0.0.0" : endpoint_.host;
    return host + ":" + std::to_string(port_);
}

void Server::wait() {
    std::unique_lock lock(stop_mutex_);
    stopped_.wait(lock, [this] { return stopped_flag_; });
}

void Server::stop() {
    if (stopping_.exchange(true)) return;
    store_.close();
    listener_.shutdown();
    if (acceptor_.joinable()) acceptor_.join();
    listener_.close();
    reap(true);
    {
        std::lock_guard lock(stop_mutex_);
        stopped_flag_ = true;
    }
    stopped_.notify_all();
}

void Server::accept_loop() {
    while (!stopping_) {
        Socket s;
        try {
            s = listener_.accept();
        } catch (const TransportError&) {
            if (stopping_) break;
            continue;
        }
        reap(false);
        std::lock_guard lock(conn_mutex_);
        if (stopping_) break;
        auto& c = connections_.emplace_back();
        c.socket = std::move(s);
        c.thread = std::thread([this, &c] { serve(c); });
    }
}

void Server::reap(bool all) {
    std::list<Connection> finished;
    {
        std::lock_guard lock(conn_mutex_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            auto next = std::next(it);
            if (all) it->socket.shutdown();
            if (all || it->done) finished.splice(finished.end(), connections_, it);
            it = next;
        }
    }
    for (auto& c : finished) c.thread.join();
}

void Server::serve(Connection& c) {
    const auto reply = [&](const Frame& f) { c.socket.write_all(encode(f)); };
    try {
        for (;;) {
            Frame req;
            try {
                req = read_frame([&](std::span<std::uint8_t> out) { c.socket.read_exact(out); },
                                 store_.capacity());
            } catch (const FormatError& e) {
                reply(Frame{Opcode::Err, e.what(), 0, {}});
                break;
            }
            switch (req.op) {
                case Opcode::Put:
                    if (store_.put(req.key, std::move(req.tensor))) {
                        reply(Frame{Opcode::Ok, req.key, 0, {}});
                    } else {
                        reply(Frame{Opcode::Err, "capacity exceeded", 0, {}});
                    }
                    break;
                case Opcode::Get: {
                    auto v = store_.get(req.key, std::chrono::milliseconds(req.timeout_ms));
                    if (v) {
                        reply(Frame{Opcode::Tensor, req.key, 0, *v});
                    } else {
                        reply(Frame{Opcode::NotFound, req.key, 0, {}});
                    }
                    break;
                }
                case Opcode::Del:
                    store_.erase(req.key);
                    reply(Frame{Opcode::Ok, req.key, 0, {}});
                    break;
                case Opcode::Ping:
                    reply(Frame{Opcode::Ok, {}, 0, {}});
                    break;
                default:
                    reply(Frame{Opcode::Err, "reply opcode sent as request", 0, {}});
                    c.socket.shutdown();
                    c.done = true;
                    return;
            }
        }
    } catch (const TransportError&) {
        // peer went away or stop() shut the socket
    } catch (const std::exception& e) {
        log::warn(std::string("broker connection dropped: ") + e.what());
    }
    c.socket.shutdown();
    c.done = true;
}

}  // namespace afc::broker
