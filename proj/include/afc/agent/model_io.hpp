#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "afc/agent/policy.hpp"

namespace afc::agent {

inline constexpr std::uint16_t model_version = 1;

/// "AFCP", u16 version, u32 layer count and u32 sizes for actor then critic,
/// u64 parameter count, parameters as little-endian f32 in
/// [actor | log_std | critic] order, u64 FNV-1a checksum.
std::vector<std::uint8_t> save_model(const PolicyParams<float>& params);
PolicyParams<float> load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const std::string& path, const PolicyParams<float>& params);
PolicyParams<float> load_model_file(const std::string& path);

}  // namespace afc::agent
