#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace afc::broker {

inline constexpr std::uint8_t wire_version = 1;
inline constexpr std::size_t max_key_bytes = 65535;
inline constexpr std::size_t max_dims = 255;

enum class Opcode : std::uint8_t {
    Put = 1,
    Get = 2,
    Del = 3,
    Ping = 4,
    Ok = 128,
    Tensor = 129,
    NotFound = 130,
    Err = 131,
};

enum class DType : std::uint8_t { F32 = 1, F64 = 2, I64 = 3 };

std::size_t element_size(DType t);

/// Dense row-major tensor; `data` holds the little-endian element bytes
/// exactly as they travel on the wire.
struct Tensor {
    DType dtype = DType::F64;
    std::vector<std::uint64_t> dims;
    std::vector<std::uint8_t> data;

    std::uint64_t element_count() const;
    bool operator==(const Tensor&) const = default;

    static Tensor from_f64(std::span<const double> values);
    static Tensor from_f64(std::span<const double> values, std::vector<std::uint64_t> dims);
    static Tensor from_f32(std::span<const float> values);
    static Tensor from_i64(std::span<const std::int64_t> values);
    /// Throws FormatError on dtype mismatch.
    std::vector<double> to_f64() const;
    std::vector<float> to_f32() const;
    std::vector<std::int64_t> to_i64() const;
};

/// One protocol message. `key` carries the error text on ERR replies;
/// `timeout_ms` is only encoded for GET and `tensor` only for PUT/TENSOR.
struct Frame {
    Opcode op = Opcode::Ping;
    std::string key;
    std::uint32_t timeout_ms = 0;
    Tensor tensor;

    bool operator==(const Frame&) const = default;
};

bool has_tensor(Opcode op);

/// Throws FormatError when a frame invariant does not hold.
void validate(const Frame& f);

std::vector<std::uint8_t> encode(const Frame& f);

/// Pulls exactly n bytes into the span or throws.
using ReadExact = std::function<void(std::span<std::uint8_t>)>;

/// Incremental decode from a stream. `max_payload` bounds the tensor byte
/// count so a hostile header cannot trigger a huge allocation.
Frame read_frame(const ReadExact& read, std::uint64_t max_payload);

/// Decodes a complete buffer; trailing bytes are an error.
Frame decode(std::span<const std::uint8_t> bytes);

}  // namespace afc::broker
