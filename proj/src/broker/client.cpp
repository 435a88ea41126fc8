#include "afc/broker/client.hpp"

#include <chrono>
#include <limits>
#include <thread>

#include "afc/errors.hpp"

namespace afc::broker {

Client::Client(const std::string& address, std::uint32_t connect_timeout_ms) {
    const Endpoint ep = parse_endpoint(address);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(connect_timeout_ms);
    for (;;) {
        try {
            socket_ = Socket::connect(ep);
            return;
        } catch (const TransportError&) {
            if (std::chrono::steady_clock::now() >= deadline) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
    }
}

Frame Client::roundtrip(const Frame& request) {
    if (!socket_.valid()) throw TransportError("connection is closed");
    try {
        socket_.write_all(encode(request));
        return read_frame([this](std::span<std::uint8_t> out) { socket_.read_exact(out); },
                          std::numeric_limits<std::uint64_t>::max());
    } catch (const TransportError&) {
        socket_.close();
        throw;
    } catch (const FormatError& e) {
        socket_.close();
        throw TransportError(std::string("malformed reply: ") + e.what());
    }
}

namespace {

void expect(const Frame& reply, Opcode op) {
    if (reply.op == Opcode::Err) throw BrokerError("broker error: " + reply.key);
    if (reply.op != op) throw TransportError("unexpected reply opcode");
}

}  // namespace

void Client::put(const std::string& key, const Tensor& tensor) {
    expect(roundtrip(Frame{Opcode::Put, key, 0, tensor}), Opcode::Ok);
}

std::optional<Tensor> Client::get(const std::string& key, std::uint32_t timeout_ms) {
    Frame reply = roundtrip(Frame{Opcode::Get, key, timeout_ms, {}});
    if (reply.op == Opcode::NotFound) return std::nullopt;
    expect(reply, Opcode::Tensor);
    return std::move(reply.tensor);
}

void Client::del(const std::string& key) { expect(roundtrip(Frame{Opcode::Del, key, 0, {}}), Opcode::Ok); }

void Client::ping() { expect(roundtrip(Frame{Opcode::Ping, {}, 0, {}}), Opcode::Ok); }

std::optional<std::vector<double>> Client::get_f64(const std::string& key, std::uint32_t timeout_ms) {
    auto t = get(key, timeout_ms);
    if (!t) return std::nullopt;
    return t->to_f64();
}

}  // namespace afc::broker
