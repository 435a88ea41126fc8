#pragma once

#include <cstdint>
#include <vector>

#include "afc/flow/config.hpp"

namespace afc::flow {

/// Uniform Cartesian grid of nx * ny * nz cells with spacing h.
struct Grid {
    int nx = 0;
    int ny = 0;
    int nz = 1;
    double h = 0.0;
    double lx = 0.0;
    double ly = 0.0;
    double lz = 0.0;
    bool periodic_x = false;
    bool periodic_y = false;

    bool three_d() const { return nz > 1; }
    long long cells() const { return static_cast<long long>(nx) * ny * nz; }
};

enum class JetSide : std::int8_t { None = -1, Top = 0, Bottom = 1 };

/// Lagrangian point on the cylinder surface (one xy-ring, shared by all z planes).
struct SurfaceMarker {
    double x = 0.0;
    double y = 0.0;
    double angle = 0.0;  ///< radians, counter-clockwise from +x
    JetSide jet = JetSide::None;
};

struct DomainGeometry {
    SimConfig sim;
    JetConfig jets;
    Grid grid;
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.5;
    std::vector<SurfaceMarker> markers;
    /// 1 for cell centres inside the cylinder, per xy cell (z-invariant).
    std::vector<std::uint8_t> cylinder_mask;

    static constexpr int marker_count = 360;

    /// Radius at which wall quantities are sampled, clear of the forcing band.
    double sample_radius() const { return radius + 1.5 * grid.h; }
    /// Arc length of the surface owned by one marker.
    double marker_arc() const;
    /// Pseudo-environment that owns z-plane k (0 in 2D).
    int pe_of_plane(int k) const;
    bool inside_cylinder(int i, int j) const {
        return !cylinder_mask.empty() && cylinder_mask[static_cast<std::size_t>(j) * grid.nx + i] != 0;
    }
};

/// Builds the grid, surface markers and jet arcs. Throws ConfigError if the
/// cylinder lacks two diameters of clearance or the grid does not tile the domain.
DomainGeometry build_domain(const SimConfig& sim, const JetConfig& jets);

}  // namespace afc::flow
