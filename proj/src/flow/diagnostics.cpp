#include "afc/flow/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "afc/errors.hpp"

namespace afc::flow {

double interpolate(const Array3& a, double h, double ox, double oy, double x, double y, int k) {
    const double sx = x / h - ox;
    const double sy = y / h - oy;
    const int i0 = static_cast<int>(std::floor(sx));
    const int j0 = static_cast<int>(std::floor(sy));
    const double fx = sx - i0;
    const double fy = sy - j0;
    return (1.0 - fy) * ((1.0 - fx) * a(i0, j0, k) + fx * a(i0 + 1, j0, k)) +
           fy * ((1.0 - fx) * a(i0, j0 + 1, k) + fx * a(i0 + 1, j0 + 1, k));
}

namespace {

struct SliceForce {
    double fx_p = 0.0, fx_v = 0.0, fy_p = 0.0, fy_v = 0.0;
};

SliceForce slice_force(const FlowField& f, const DomainGeometry& geom, int k) {
    const double h = geom.grid.h;
    const double mu = SimConfig::rho * geom.sim.nu();
    const double rs = geom.sample_radius();
    const double ds = geom.marker_arc();
    auto uat = [&](double x, double y) { return interpolate(f.u, h, 0.0, 0.5, x, y, k); };
    auto vat = [&](double x, double y) { return interpolate(f.v, h, 0.5, 0.0, x, y, k); };

    SliceForce out;
    for (const auto& mk : geom.markers) {
        const double nx = std::cos(mk.angle);
        const double ny = std::sin(mk.angle);
        const double x = geom.cx + rs * nx;
        const double y = geom.cy + rs * ny;
        const double p = interpolate(f.p, h, 0.5, 0.5, x, y, k);
        const double ux = (uat(x + h, y) - uat(x - h, y)) / (2.0 * h);
        const double uy = (uat(x, y + h) - uat(x, y - h)) / (2.0 * h);
        const double vx = (vat(x + h, y) - vat(x - h, y)) / (2.0 * h);
        const double vy = (vat(x, y + h) - vat(x, y - h)) / (2.0 * h);
        const double shear = uy + vx;
        out.fx_p += -p * nx * ds;
        out.fy_p += -p * ny * ds;
        out.fx_v += mu * (2.0 * ux * nx + shear * ny) * ds;
        out.fy_v += mu * (shear * nx + 2.0 * vy * ny) * ds;
    }
    return out;
}

int probe_plane(const DomainGeometry& geom, int pe) {
    if (!geom.grid.three_d()) return 0;
    const double z = (pe + 0.5) * geom.jets.l_jet;
    int k = static_cast<int>(std::floor(z / geom.grid.h));
    return std::min(k, geom.grid.nz - 1);
}

}  // namespace

ForceRecord compute_forces(const FlowField& field, const DomainGeometry& geom) {
    const int n_pe = geom.sim.n_pe;
    ForceRecord rec;
    rec.t = field.t;
    rec.pe.resize(static_cast<std::size_t>(n_pe));
    if (geom.markers.empty()) return rec;

    const double q_ref = 0.5 * SimConfig::rho * SimConfig::u_inf * SimConfig::u_inf;
    const double area = geom.jets.l_jet * SimConfig::diameter;
    auto to_coefficients = [&](const SliceForce& s, double span) {
        Coefficients c;
        c.cd_press = s.fx_p * span / (q_ref * area);
        c.cd_visc = s.fx_v * span / (q_ref * area);
        c.cl_press = s.fy_p * span / (q_ref * area);
        c.cl_visc = s.fy_v * span / (q_ref * area);
        c.cd = c.cd_press + c.cd_visc;
        c.cl = c.cl_press + c.cl_visc;
        return c;
    };

    if (!geom.grid.three_d()) {
        const Coefficients c = to_coefficients(slice_force(field, geom, 0), geom.jets.l_jet);
        for (auto& pe : rec.pe) pe = c;
        return rec;
    }
    std::vector<SliceForce> acc(static_cast<std::size_t>(n_pe));
    for (int k = 0; k < geom.grid.nz; ++k) {
        const SliceForce s = slice_force(field, geom, k);
        auto& a = acc[static_cast<std::size_t>(geom.pe_of_plane(k))];
        a.fx_p += s.fx_p;
        a.fx_v += s.fx_v;
        a.fy_p += s.fy_p;
        a.fy_v += s.fy_v;
    }
    for (int e = 0; e < n_pe; ++e) {
        rec.pe[static_cast<std::size_t>(e)] = to_coefficients(acc[static_cast<std::size_t>(e)], geom.grid.h);
    }
    return rec;
}

double reference_pressure(const FlowField& field, const DomainGeometry& geom) {
    const auto& g = geom.grid;
    double sum = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) sum += field.p(0, j, k);
    }
    return sum / (static_cast<double>(g.ny) * g.nz);
}

WitnessLayout default_witness_layout(const DomainGeometry& geom) {
    WitnessLayout layout;
    for (double r : {0.6, 0.8, 1.0}) {
        for (int m = 0; m < 24; ++m) {
            const double a = (7.5 + 15.0 * m) * std::numbers::pi / 180.0;
            layout.points.push_back({geom.cx + r * std::cos(a), geom.cy + r * std::sin(a)});
        }
    }
    for (int m = 0; m < 13; ++m) {
        layout.points.push_back({geom.cx + 0.75 + 0.25 * m, geom.cy});
    }
    const auto& g = geom.grid;
    for (const auto& p : layout.points) {
        const double dx = p[0] - geom.cx;
        const double dy = p[1] - geom.cy;
        const bool inside_domain = p[0] > g.h && p[0] < g.lx - g.h && p[1] > g.h && p[1] < g.ly - g.h;
        const bool outside_body = std::sqrt(dx * dx + dy * dy) > geom.radius;
        if (!inside_domain || !outside_body) {
            std::ostringstream msg;
            msg << "witness point (" << p[0] << ", " << p[1] << ") is not in the fluid";
            throw ConfigError(msg.str());
        }
    }
    return layout;
}

std::vector<std::vector<double>> sample_witness(const FlowField& field, const DomainGeometry& geom,
                                                const WitnessLayout& layout) {
    const int n_pe = geom.sim.n_pe;
    const double p_ref = reference_pressure(field, geom);
    const double inv_q = 1.0 / (0.5 * SimConfig::rho * SimConfig::u_inf * SimConfig::u_inf);
    const double h = geom.grid.h;

    std::vector<std::vector<double>> own(static_cast<std::size_t>(n_pe));
    for (int e = 0; e < n_pe; ++e) {
        if (e > 0 && !geom.grid.three_d()) {
            own[static_cast<std::size_t>(e)] = own[0];
            continue;
        }
        const int k = probe_plane(geom, e);
        auto& o = own[static_cast<std::size_t>(e)];
        o.reserve(layout.points.size());
        for (const auto& p : layout.points) {
            o.push_back((interpolate(field.p, h, 0.5, 0.5, p[0], p[1], k) - p_ref) * inv_q);
        }
    }

    std::vector<std::vector<double>> obs(static_cast<std::size_t>(n_pe));
    for (int e = 0; e < n_pe; ++e) {
        const auto& left = own[static_cast<std::size_t>((e + n_pe - 1) % n_pe)];
        const auto& self = own[static_cast<std::size_t>(e)];
        const auto& right = own[static_cast<std::size_t>((e + 1) % n_pe)];
        auto& o = obs[static_cast<std::size_t>(e)];
        o.reserve(left.size() * 3);
        o.insert(o.end(), left.begin(), left.end());
        o.insert(o.end(), self.begin(), self.end());
        o.insert(o.end(), right.begin(), right.end());
    }
    return obs;
}

CpProfile compute_cp(const FlowField& field, const DomainGeometry& geom) {
    CpProfile prof;
    if (geom.markers.empty()) return prof;
    const double p_ref = reference_pressure(field, geom);
    const double inv_q = 1.0 / (0.5 * SimConfig::rho * SimConfig::u_inf * SimConfig::u_inf);
    const double rs = geom.sample_radius();
    const double h = geom.grid.h;
    const std::size_t n = geom.markers.size();
    prof.theta_deg.resize(n);
    prof.cp.assign(n, 0.0);
    // theta = 0 at the front stagnation point (angle pi), increasing over the top.
    for (std::size_t m = 0; m < n; ++m) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        const double angle = std::numbers::pi - theta;
        const double x = geom.cx + rs * std::cos(angle);
        const double y = geom.cy + rs * std::sin(angle);
        double sum = 0.0;
        for (int k = 0; k < geom.grid.nz; ++k) sum += interpolate(field.p, h, 0.5, 0.5, x, y, k);
        prof.theta_deg[m] = 360.0 * static_cast<double>(m) / static_cast<double>(n);
        prof.cp[m] = (sum / geom.grid.nz - p_ref) * inv_q;
    }
    return prof;
}

}  // namespace afc::flow
