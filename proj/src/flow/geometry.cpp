#include "afc/flow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/flow/jets.hpp"

namespace afc::flow {

namespace {

int tile_count(double length, double h, const char* axis) {
    const double n = length / h;
    const long long rounded = std::llround(n);
    if (rounded < 4 || std::abs(n - static_cast<double>(rounded)) > 1e-9 * n) {
        std::ostringstream msg;
        msg << "grid spacing h=" << h << " does not tile " << axis << " extent " << length;
        throw ConfigError(msg.str());
    }
    return static_cast<int>(rounded);
}

}  // namespace

void SimConfig::validate() const {
    if (!(reynolds > 0.0)) throw ConfigError("Re must be positive");
    if (!(h > 0.0)) throw ConfigError("grid spacing h must be positive");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("domain extents must be positive");
    if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl must lie in (0, 1]");
    if (n_pe < 1) throw ConfigError("n_pe must be at least 1");
    if (forcing_iterations < 1) throw ConfigError("forcing_iterations must be at least 1");
    if (with_cylinder) {
        const double clearance = 2.0 * diameter;
        const double r = radius();
        const double x = center[0];
        const double y = center[1];
        if (x - r < clearance || lx - (x + r) < clearance || y - r < clearance ||
            ly - (y + r) < clearance) {
            std::ostringstream msg;
            msg << "cylinder at (" << x << ", " << y << ") needs " << clearance
                << "D clearance inside the " << lx << " x " << ly << " domain";
            throw ConfigError(msg.str());
        }
    }
}

void JetConfig::validate() const {
    if (!(omega_deg > 0.0 && omega_deg < 180.0)) throw ConfigError("jet width omega must lie in (0, 180) degrees");
    if (!(q_max >= 0.0)) throw ConfigError("q_max must be non-negative");
    if (!(l_jet > 0.0)) throw ConfigError("l_jet must be positive");
}

double DomainGeometry::marker_arc() const {
    return 2.0 * std::numbers::pi * radius / marker_count;
}

int DomainGeometry::pe_of_plane(int k) const {
    if (!grid.three_d()) return 0;
    const double z = (k + 0.5) * grid.h;
    int pe = static_cast<int>(z / jets.l_jet);
    return pe < sim.n_pe ? pe : sim.n_pe - 1;
}

DomainGeometry build_domain(const SimConfig& sim, const JetConfig& jets) {
    sim.validate();
    jets.validate();

    DomainGeometry g;
    g.sim = sim;
    g.jets = jets;
    g.grid.h = sim.h;
    g.grid.lx = sim.lx;
    g.grid.ly = sim.ly;
    g.grid.nx = tile_count(sim.lx, sim.h, "x");
    g.grid.ny = tile_count(sim.ly, sim.h, "y");
    g.grid.periodic_x = sim.periodic_box;
    g.grid.periodic_y = sim.periodic_box;
    if (sim.three_d) {
        g.grid.lz = sim.n_pe * jets.l_jet;
        g.grid.nz = tile_count(g.grid.lz, sim.h, "z");
    } else {
        g.grid.lz = jets.l_jet;
        g.grid.nz = 1;
    }

    g.cx = sim.center[0];
    g.cy = sim.center[1];
    g.radius = sim.radius();
    if (!sim.with_cylinder) return g;

    g.markers.reserve(DomainGeometry::marker_count);
    for (int m = 0; m < DomainGeometry::marker_count; ++m) {
        SurfaceMarker mk;
        mk.angle = 2.0 * std::numbers::pi * m / DomainGeometry::marker_count;
        mk.x = g.cx + g.radius * std::cos(mk.angle);
        mk.y = g.cy + g.radius * std::sin(mk.angle);
        mk.jet = jets.enabled ? jet_side(mk.angle, jets) : JetSide::None;
        g.markers.push_back(mk);
    }

    const int nx = g.grid.nx;
    const int ny = g.grid.ny;
    g.cylinder_mask.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double dx = (i + 0.5) * sim.h - g.cx;
            const double dy = (j + 0.5) * sim.h - g.cy;
            if (dx * dx + dy * dy < g.radius * g.radius) {
                g.cylinder_mask[static_cast<std::size_t>(j) * nx + i] = 1;
            }
        }
    }
    return g;
}

}  // namespace afc::flow
