#include "afc/broker/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "afc/errors.hpp"
#include "afc/util/bytes.hpp"

namespace afc::broker {

namespace {

bool known_opcode(std::uint8_t op) {
    return (op >= 1 && op <= 4) || (op >= 128 && op <= 131);
}

bool known_dtype(std::uint8_t t) { return t >= 1 && t <= 3; }

/// Product of dims times element size, or nullopt-style max on overflow.
std::uint64_t byte_count(DType t, std::span<const std::uint64_t> dims) {
    std::uint64_t n = element_size(t);
    for (std::uint64_t d : dims) {
        if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        n *= d;
    }
    return n;
}

template <typename T, typename Bits>
std::vector<std::uint8_t> pack(std::span<const T> values) {
    std::vector<std::uint8_t> out(values.size() * sizeof(T));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto b = std::bit_cast<Bits>(values[i]);
        for (std::size_t k = 0; k < sizeof(T); ++k) {
            out[i * sizeof(T) + k] = static_cast<std::uint8_t>(b >> (8 * k));
        }
    }
    return out;
}

template <typename T, typename Bits>
std::vector<T> unpack(const std::vector<std::uint8_t>& data) {
    std::vector<T> out(data.size() / sizeof(T));
    for (std::size_t i = 0; i < out.size(); ++i) {
        Bits b = 0;
        for (std::size_t k = 0; k < sizeof(T); ++k) b |= static_cast<Bits>(data[i * sizeof(T) + k]) << (8 * k);
        out[i] = std::bit_cast<T>(b);
    }
    return out;
}

}  // namespace

std::size_t element_size(DType t) {
    switch (t) {
        case DType::F32: return 4;
        case DType::F64:
        case DType::I64: return 8;
    }
    throw FormatError("unknown dtype");
}

std::uint64_t Tensor::element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

Tensor Tensor::from_f64(std::span<const double> values) {
    return from_f64(values, {values.size()});
}

Tensor Tensor::from_f64(std::span<const double> values, std::vector<std::uint64_t> dims) {
    Tensor t{DType::F64, std::move(dims), pack<double, std::uint64_t>(values)};
    if (t.element_count() != values.size()) throw FormatError("tensor dims do not match value count");
    return t;
}

Tensor Tensor::from_f32(std::span<const float> values) {
    return Tensor{DType::F32, {values.size()}, pack<float, std::uint32_t>(values)};
}

Tensor Tensor::from_i64(std::span<const std::int64_t> values) {
    return Tensor{DType::I64, {values.size()}, pack<std::int64_t, std::uint64_t>(values)};
}

std::vector<double> Tensor::to_f64() const {
    if (dtype != DType::F64) throw FormatError("tensor is not f64");
    return unpack<double, std::uint64_t>(data);
}

std::vector<float> Tensor::to_f32() const {
    if (dtype != DType::F32) throw FormatError("tensor is not f32");
    return unpack<float, std::uint32_t>(data);
}

std::vector<std::int64_t> Tensor::to_i64() const {
    if (dtype != DType::I64) throw FormatError("tensor is not i64");
    return unpack<std::int64_t, std::uint64_t>(data);
}

bool has_tensor(Opcode op) { return op == Opcode::Put || op == Opcode::Tensor; }

void validate(const Frame& f) {
    if (!known_opcode(static_cast<std::uint8_t>(f.op))) throw FormatError("unknown opcode");
    if (f.key.size() > max_key_bytes) throw FormatError("key longer than 65535 bytes");
    const bool needs_key = f.op == Opcode::Put || f.op == Opcode::Get || f.op == Opcode::Del;
    if (needs_key && f.key.empty()) throw FormatError("empty key");
    if (has_tensor(f.op)) {
        if (!known_dtype(static_cast<std::uint8_t>(f.tensor.dtype))) throw FormatError("unknown dtype");
        if (f.tensor.dims.size() > max_dims) throw FormatError("too many dimensions");
        if (byte_count(f.tensor.dtype, f.tensor.dims) != f.tensor.data.size()) {
            throw FormatError("payload size does not match dims");
        }
    }
}

std::vector<std::uint8_t> encode(const Frame& f) {
    validate(f);
    util::ByteWriter w;
    w.text("AFCB");
    w.u8(wire_version);
    w.u8(static_cast<std::uint8_t>(f.op));
    w.u16(static_cast<std::uint16_t>(f.key.size()));
    w.text(f.key);
    if (f.op == Opcode::Get) w.u32(f.timeout_ms);
    if (has_tensor(f.op)) {
        w.u8(static_cast<std::uint8_t>(f.tensor.dtype));
        w.u8(static_cast<std::uint8_t>(f.tensor.dims.size()));
        for (auto d : f.tensor.dims) w.u64(d);
        w.bytes(f.tensor.data);
    }
    return w.take();
}

Frame read_frame(const ReadExact& read, std::uint64_t max_payload) {
    std::uint8_t head[8];
    read(head);
    if (std::memcmp(head, "AFCB", 4) != 0) throw FormatError("bad magic");
    if (head[4] != wire_version) throw FormatError("unsupported protocol version");
    if (!known_opcode(head[5])) throw FormatError("unknown opcode");
    Frame f;
    f.op = static_cast<Opcode>(head[5]);
    const std::size_t key_len = head[6] | (static_cast<std::size_t>(head[7]) << 8);
    f.key.resize(key_len);
    read(std::span(reinterpret_cast<std::uint8_t*>(f.key.data()), key_len));
    if (f.op == Opcode::Get) {
        std::uint8_t t[4];
        read(t);
        f.timeout_ms = util::ByteReader(t).u32();
    }
    if (has_tensor(f.op)) {
        std::uint8_t td[2];
        read(td);
        if (!known_dtype(td[0])) throw FormatError("unknown dtype");
        f.tensor.dtype = static_cast<DType>(td[0]);
        std::vector<std::uint8_t> dims(8 * static_cast<std::size_t>(td[1]));
        read(dims);
        util::ByteReader r(dims);
        f.tensor.dims.resize(td[1]);
        for (auto& d : f.tensor.dims) d = r.u64();
        const std::uint64_t n = byte_count(f.tensor.dtype, f.tensor.dims);
        if (n > max_payload) throw FormatError("payload exceeds limit");
        f.tensor.data.resize(static_cast<std::size_t>(n));
        read(f.tensor.data);
    }
    validate(f);
    return f;
}

Frame decode(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto reader = [&](std::span<std::uint8_t> out) {
        if (bytes.size() - pos < out.size()) throw FormatError("truncated frame");
        std::memcpy(out.data(), bytes.data() + pos, out.size());
        pos += out.size();
    };
    Frame f = read_frame(reader, bytes.size());
    if (pos != bytes.size()) throw FormatError("trailing bytes after frame");
    return f;
}

}  // namespace afc::broker
