#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "afc/errors.hpp"
#include "afc/flow/solver.hpp"

namespace afc::flow {

class CheckpointError : public FormatError {
public:
    enum class Kind { VersionMismatch, Corrupt, ShapeMismatch };
    CheckpointError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::uint16_t checkpoint_version = 1;

/// Layout: "AFCS", u16 version, u32 nx, ny, nz, f64 t, then the interior of
/// u, v, [w], p as little-endian f64 (x fastest), then a u8 history flag with
/// f64 dt_prev and the AB2 tendencies, then a u64 FNV-1a checksum.
std::vector<std::uint8_t> save_checkpoint(const FlowField& field, const Grid& grid);

/// Restores a field for `solver`'s grid, ghosts included.
FlowField load_checkpoint(std::span<const std::uint8_t> bytes, const FlowSolver& solver);

}  // namespace afc::flow
