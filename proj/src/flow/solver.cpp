#include "afc/flow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/flow/jets.hpp"

namespace afc::flow {

double roma_kernel(double r) {
    r = std::abs(r);
    if (r <= 0.5) return (1.0 + std::sqrt(1.0 - 3.0 * r * r)) / 3.0;
    if (r <= 1.5) {
        const double s = 1.0 - r;
        return (5.0 - 3.0 * r - std::sqrt(std::max(0.0, 1.0 - 3.0 * s * s))) / 6.0;
    }
    return 0.0;
}

namespace {

std::array<AxisBc, 3> pressure_bcs(const Grid& g) {
    return {g.periodic_x ? AxisBc::Periodic : AxisBc::NeumannDirichlet,
            g.periodic_y ? AxisBc::Periodic : AxisBc::NeumannNeumann, AxisBc::Periodic};
}

}  // namespace

FlowSolver::FlowSolver(DomainGeometry geometry)
    : geom_(std::move(geometry)),
      poisson_(geom_.grid.nx, geom_.grid.ny, geom_.grid.nz, geom_.grid.h, pressure_bcs(geom_.grid),
               geom_.sim.spectral_preconditioner ? PoissonSolver::Preconditioner::Spectral
                                                 : PoissonSolver::Preconditioner::Jacobi,
               geom_.sim.poisson_max_iterations, geom_.sim.poisson_tolerance) {
    const auto& g = geom_.grid;
    rhs_.assign(static_cast<std::size_t>(g.cells()), 0.0);
    phi_.assign(static_cast<std::size_t>(g.cells()), 0.0);
    FlowField proto = make_field();
    hu_ = proto.hu;
    hv_ = proto.hv;
    hw_ = proto.hw;

    for (const auto& m : geom_.markers) {
        u_stencils_.push_back(make_stencil(m.x, m.y, 0.0, 0.5, proto.u));
        v_stencils_.push_back(make_stencil(m.x, m.y, 0.5, 0.0, proto.v));
        if (g.three_d()) w_stencils_.push_back(make_stencil(m.x, m.y, 0.5, 0.5, proto.w));
    }
    marker_desired_u_.assign(geom_.markers.size(), 0.0);
    marker_desired_v_.assign(geom_.markers.size(), 0.0);
}

FlowSolver::Stencil FlowSolver::make_stencil(double x, double y, double ox, double oy,
                                             const Array3& a) const {
    const double h = geom_.grid.h;
    const double sx = x / h - ox;
    const double sy = y / h - oy;
    Stencil st;
    const std::ptrdiff_t base = a.index(0, 0, 0);
    for (int j = static_cast<int>(std::ceil(sy - 1.5)); j <= static_cast<int>(std::floor(sy + 1.5)); ++j) {
        const double wy = roma_kernel(j - sy);
        if (wy == 0.0) continue;
        for (int i = static_cast<int>(std::ceil(sx - 1.5)); i <= static_cast<int>(std::floor(sx + 1.5)); ++i) {
            const double wx = roma_kernel(i - sx);
            if (wx == 0.0) continue;
            st.offset.push_back(a.index(i, j, 0) - base);
            st.weight.push_back(wx * wy);
        }
    }
    return st;
}

FlowField FlowSolver::make_field() const {
    const auto& g = geom_.grid;
    const int gz = g.three_d() ? 1 : 0;
    FlowField f;
    f.u = Array3(g.nx + 1, g.ny, g.nz, 1, 1, gz);
    f.v = Array3(g.nx, g.ny + 1, g.nz, 1, 1, gz);
    if (g.three_d()) f.w = Array3(g.nx, g.ny, g.nz + 1, 1, 1, 1);
    f.p = Array3(g.nx, g.ny, g.nz, 1, 1, gz);
    f.hu = f.u;
    f.hv = f.v;
    f.hw = f.w;
    return f;
}

FlowField FlowSolver::uniform_field() const {
    FlowField f = make_field();
    f.u.fill(SimConfig::u_inf);
    fill_ghosts(f);
    return f;
}

void FlowSolver::fill_ghosts(FlowField& f) const {
    const auto& g = geom_.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const bool three_d = g.three_d();
    const bool px = g.periodic_x, py = g.periodic_y;

    // u on x-faces
    {
        Array3& u = f.u;
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                if (px) {
                    u(nx, j, k) = u(0, j, k);
                    u(-1, j, k) = u(nx - 1, j, k);
                    u(nx + 1, j, k) = u(1, j, k);
                } else {
                    u(-1, j, k) = u(0, j, k);
                    u(nx + 1, j, k) = u(nx, j, k);
                }
            }
            for (int i = -1; i <= nx + 1; ++i) {
                u(i, -1, k) = py ? u(i, ny - 1, k) : u(i, 0, k);
                u(i, ny, k) = py ? u(i, 0, k) : u(i, ny - 1, k);
            }
        }
        if (three_d) {
            for (int j = -1; j <= ny; ++j) {
                for (int i = -1; i <= nx + 1; ++i) {
                    u(i, j, -1) = u(i, j, nz - 1);
                    u(i, j, nz) = u(i, j, 0);
                }
            }
        }
    }
    // v on y-faces
    {
        Array3& v = f.v;
        for (int k = 0; k < nz; ++k) {
            for (int i = 0; i < nx; ++i) {
                if (py) {
                    v(i, ny, k) = v(i, 0, k);
                    v(i, -1, k) = v(i, ny - 1, k);
                    v(i, ny + 1, k) = v(i, 1, k);
                } else {
                    v(i, -1, k) = -v(i, 1, k);
                    v(i, ny + 1, k) = -v(i, ny - 1, k);
                }
            }
            for (int j = -1; j <= ny + 1; ++j) {
                v(-1, j, k) = px ? v(nx - 1, j, k) : -v(0, j, k);
                v(nx, j, k) = px ? v(0, j, k) : v(nx - 1, j, k);
            }
        }
        if (three_d) {
            for (int j = -1; j <= ny + 1; ++j) {
                for (int i = -1; i <= nx; ++i) {
                    v(i, j, -1) = v(i, j, nz - 1);
                    v(i, j, nz) = v(i, j, 0);
                }
            }
        }
    }
    // w on z-faces (always periodic in z)
    if (three_d) {
        Array3& w = f.w;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                w(i, j, nz) = w(i, j, 0);
            }
        }
        for (int k = 0; k <= nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                w(-1, j, k) = px ? w(nx - 1, j, k) : -w(0, j, k);
                w(nx, j, k) = px ? w(0, j, k) : w(nx - 1, j, k);
            }
            for (int i = -1; i <= nx; ++i) {
                w(i, -1, k) = py ? w(i, ny - 1, k) : w(i, 0, k);
                w(i, ny, k) = py ? w(i, 0, k) : w(i, ny - 1, k);
            }
        }
        for (int j = -1; j <= ny; ++j) {
            for (int i = -1; i <= nx; ++i) {
                w(i, j, -1) = w(i, j, nz - 1);
                w(i, j, nz + 1) = w(i, j, 1);
            }
        }
    }
    // p at cell centres: Neumann at inlet and walls, zero at the outlet face
    {
        Array3& p = f.p;
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                p(-1, j, k) = px ? p(nx - 1, j, k) : p(0, j, k);
                p(nx, j, k) = px ? p(0, j, k) : -p(nx - 1, j, k);
            }
            for (int i = -1; i <= nx; ++i) {
                p(i, -1, k) = py ? p(i, ny - 1, k) : p(i, 0, k);
                p(i, ny, k) = py ? p(i, 0, k) : p(i, ny - 1, k);
            }
        }
        if (three_d) {
            for (int j = -1; j <= ny; ++j) {
                for (int i = -1; i <= nx; ++i) {
                    p(i, j, -1) = p(i, j, nz - 1);
                    p(i, j, nz) = p(i, j, 0);
                }
            }
        }
    }
}

void FlowSolver::momentum_rhs(const FlowField& f, Array3& hu, Array3& hv, Array3& hw) const {
    const auto& g = geom_.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const bool three_d = g.three_d();
    const double inv_h = 1.0 / g.h;
    const double nu_h2 = geom_.sim.nu() / (g.h * g.h);
    const Array3& u = f.u;
    const Array3& v = f.v;
    const Array3& w = f.w;

    const int iu0 = g.periodic_x ? 0 : 1;
    const int jv0 = g.periodic_y ? 0 : 1;

    // u-momentum
    {
        const std::ptrdiff_t sj = u.stride_j();
        const std::ptrdiff_t vsj = v.stride_j();
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                const double* ur = u.ptr(0, j, k);
                const double* vr = v.ptr(0, j, k);
                double* hr = hu.ptr(0, j, k);
                for (int i = iu0; i < nx; ++i) {
                    const double uc = ur[i];
                    const double ue = 0.5 * (uc + ur[i + 1]);
                    const double uw = 0.5 * (ur[i - 1] + uc);
                    const double un = 0.5 * (uc + ur[i + sj]);
                    const double us = 0.5 * (ur[i - sj] + uc);
                    const double vn = 0.5 * (vr[i - 1 + vsj] + vr[i + vsj]);
                    const double vs = 0.5 * (vr[i - 1] + vr[i]);
                    double adv = ue * ue - uw * uw + un * vn - us * vs;
                    double lap = ur[i + 1] + ur[i - 1] + ur[i + sj] + ur[i - sj] - 4.0 * uc;
                    if (three_d) {
                        const double ut = 0.5 * (uc + u(i, j, k + 1));
                        const double ub = 0.5 * (u(i, j, k - 1) + uc);
                        const double wt = 0.5 * (w(i - 1, j, k + 1) + w(i, j, k + 1));
                        const double wb = 0.5 * (w(i - 1, j, k) + w(i, j, k));
                        adv += ut * wt - ub * wb;
                        lap += u(i, j, k + 1) + u(i, j, k - 1) - 2.0 * uc;
                    }
                    hr[i] = -adv * inv_h + nu_h2 * lap;
                }
            }
        }
    }
    // v-momentum
    {
        const std::ptrdiff_t sj = v.stride_j();
        const std::ptrdiff_t usj = u.stride_j();
        for (int k = 0; k < nz; ++k) {
            for (int j = jv0; j < ny; ++j) {
                const double* vr = v.ptr(0, j, k);
                const double* ur = u.ptr(0, j, k);
                double* hr = hv.ptr(0, j, k);
                for (int i = 0; i < nx; ++i) {
                    const double vc = vr[i];
                    const double ue = 0.5 * (ur[i + 1 - usj] + ur[i + 1]);
                    const double ve = 0.5 * (vc + vr[i + 1]);
                    const double uw = 0.5 * (ur[i - usj] + ur[i]);
                    const double vw = 0.5 * (vr[i - 1] + vc);
                    const double vn = 0.5 * (vc + vr[i + sj]);
                    const double vs = 0.5 * (vr[i - sj] + vc);
                    double adv = ue * ve - uw * vw + vn * vn - vs * vs;
                    double lap = vr[i + 1] + vr[i - 1] + vr[i + sj] + vr[i - sj] - 4.0 * vc;
                    if (three_d) {
                        const double wt = 0.5 * (w(i, j - 1, k + 1) + w(i, j, k + 1));
                        const double vt = 0.5 * (vc + v(i, j, k + 1));
                        const double wb = 0.5 * (w(i, j - 1, k) + w(i, j, k));
                        const double vb = 0.5 * (v(i, j, k - 1) + vc);
                        adv += vt * wt - vb * wb;
                        lap += v(i, j, k + 1) + v(i, j, k - 1) - 2.0 * vc;
                    }
                    hr[i] = -adv * inv_h + nu_h2 * lap;
                }
            }
        }
    }
    // w-momentum
    if (three_d) {
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const double wc = w(i, j, k);
                    const double ue = 0.5 * (u(i + 1, j, k - 1) + u(i + 1, j, k));
                    const double we = 0.5 * (wc + w(i + 1, j, k));
                    const double uw = 0.5 * (u(i, j, k - 1) + u(i, j, k));
                    const double ww = 0.5 * (w(i - 1, j, k) + wc);
                    const double vn = 0.5 * (v(i, j + 1, k - 1) + v(i, j + 1, k));
                    const double wn = 0.5 * (wc + w(i, j + 1, k));
                    const double vs = 0.5 * (v(i, j, k - 1) + v(i, j, k));
                    const double ws = 0.5 * (w(i, j - 1, k) + wc);
                    const double wt = 0.5 * (wc + w(i, j, k + 1));
                    const double wb = 0.5 * (w(i, j, k - 1) + wc);
                    const double adv = ue * we - uw * ww + vn * wn - vs * ws + wt * wt - wb * wb;
                    const double lap = w(i + 1, j, k) + w(i - 1, j, k) + w(i, j + 1, k) +
                                       w(i, j - 1, k) + w(i, j, k + 1) + w(i, j, k - 1) - 6.0 * wc;
                    hw(i, j, k) = -adv * inv_h + nu_h2 * lap;
                }
            }
        }
    }
}

double FlowSolver::max_speed(const FlowField& f) const {
    double m = 0.0;
    bool finite = true;
    auto scan = [&](const Array3& a) {
        for (double x : a.raw()) {
            finite = finite && std::isfinite(x);
            m = std::max(m, std::abs(x));
        }
    };
    scan(f.u);
    scan(f.v);
    if (geom_.grid.three_d()) scan(f.w);
    return finite ? m : std::numeric_limits<double>::infinity();
}

double FlowSolver::stable_dt(const FlowField& field) const {
    const auto& g = geom_.grid;
    const double speed = std::max(max_speed(field), SimConfig::u_inf);
    if (!std::isfinite(speed)) throw NumericalError("non-finite velocity field");
    const double dims = g.three_d() ? 3.0 : 2.0;
    const double diffusive = 0.8 * g.h * g.h / (4.0 * dims * geom_.sim.nu());
    return std::min(geom_.sim.cfl * g.h / speed, diffusive);
}

std::vector<double> FlowSolver::convective_outlet(const FlowField& f, double dt) const {
    const auto& g = geom_.grid;
    const int nx = g.nx;
    const double c = SimConfig::u_inf * dt / g.h;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.ny) * g.nz);
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            const double ub = f.u(nx, j, k);
            out.push_back(ub - c * (ub - f.u(nx - 1, j, k)));
        }
    }
    return out;
}

void FlowSolver::outlet_and_walls(FlowField& f, const std::vector<double>& outlet) const {
    const auto& g = geom_.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    double inflow = 0.0, outflow = 0.0;
    std::size_t n = 0;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j, ++n) {
            f.u(0, j, k) = SimConfig::u_inf;
            f.u(nx, j, k) = outlet[n];
            inflow += f.u(0, j, k);
            outflow += f.u(nx, j, k);
        }
    }
    const double correction = (inflow - outflow) / (static_cast<double>(ny) * nz);
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) f.u(nx, j, k) += correction;
    }
}

void FlowSolver::apply_forcing(FlowField& f, std::span<const double> q, double dt) {
    (void)dt;  // the forcing increment dt * (U_d - U) / dt reduces to U_d - U
    if (geom_.markers.empty()) return;
    const auto& g = geom_.grid;
    const std::size_t nm = geom_.markers.size();
    const double spread = geom_.marker_arc() / g.h;

    double q_mean = 0.0;
    if (!q.empty()) q_mean = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());

    std::vector<double> du(nm), dv(nm);
    for (int k = 0; k < g.nz; ++k) {
        const double qk = g.three_d() && !q.empty() ? q[static_cast<std::size_t>(geom_.pe_of_plane(k))]
                                                    : q_mean;
        for (std::size_t m = 0; m < nm; ++m) {
            const auto& mk = geom_.markers[m];
            Velocity2 d{};
            if (mk.jet != JetSide::None) d = jet_velocity(qk, mk.angle, geom_.jets);
            marker_desired_u_[m] = d.u;
            marker_desired_v_[m] = d.v;
        }
        double* ub = f.u.ptr(0, 0, k);
        double* vb = f.v.ptr(0, 0, k);
        for (int it = 0; it < geom_.sim.forcing_iterations; ++it) {
            for (std::size_t m = 0; m < nm; ++m) {
                double us = 0.0, vs = 0.0;
                const auto& su = u_stencils_[m];
                for (std::size_t s = 0; s < su.offset.size(); ++s) us += su.weight[s] * ub[su.offset[s]];
                const auto& sv = v_stencils_[m];
                for (std::size_t s = 0; s < sv.offset.size(); ++s) vs += sv.weight[s] * vb[sv.offset[s]];
                du[m] = marker_desired_u_[m] - us;
                dv[m] = marker_desired_v_[m] - vs;
            }
            for (std::size_t m = 0; m < nm; ++m) {
                const auto& su = u_stencils_[m];
                for (std::size_t s = 0; s < su.offset.size(); ++s) ub[su.offset[s]] += du[m] * su.weight[s] * spread;
                const auto& sv = v_stencils_[m];
                for (std::size_t s = 0; s < sv.offset.size(); ++s) vb[sv.offset[s]] += dv[m] * sv.weight[s] * spread;
            }
        }
    }
    if (g.three_d()) {
        for (int k = 0; k < g.nz; ++k) {
            double* wb = f.w.ptr(0, 0, k);
            for (int it = 0; it < geom_.sim.forcing_iterations; ++it) {
                for (std::size_t m = 0; m < nm; ++m) {
                    double ws = 0.0;
                    const auto& sw = w_stencils_[m];
                    for (std::size_t s = 0; s < sw.offset.size(); ++s) ws += sw.weight[s] * wb[sw.offset[s]];
                    du[m] = -ws;
                }
                for (std::size_t m = 0; m < nm; ++m) {
                    const auto& sw = w_stencils_[m];
                    for (std::size_t s = 0; s < sw.offset.size(); ++s) wb[sw.offset[s]] += du[m] * sw.weight[s] * spread;
                }
            }
        }
    }
}

void FlowSolver::project(FlowField& f, double dt, StepInfo& info) {
    const auto& g = geom_.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const bool three_d = g.three_d();
    const double inv_h = 1.0 / g.h;
    const double inv_dt = 1.0 / dt;

    std::size_t c = 0;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i, ++c) {
                double div = f.u(i + 1, j, k) - f.u(i, j, k) + f.v(i, j + 1, k) - f.v(i, j, k);
                if (three_d) div += f.w(i, j, k + 1) - f.w(i, j, k);
                rhs_[c] = div * inv_h * inv_dt;
            }
        }
    }
    const PoissonStats st = poisson_.solve(rhs_, phi_);
    info.poisson_iterations = st.iterations;
    info.poisson_residual = st.relative_residual;

    auto phi = [&](int i, int j, int k) {
        return phi_[(static_cast<std::size_t>(k) * ny + j) * nx + i];
    };
    const double s = dt * inv_h;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            if (g.periodic_x) {
                f.u(0, j, k) -= s * (phi(0, j, k) - phi(nx - 1, j, k));
            }
            for (int i = 1; i < nx; ++i) f.u(i, j, k) -= s * (phi(i, j, k) - phi(i - 1, j, k));
            if (!g.periodic_x) f.u(nx, j, k) -= s * (-2.0 * phi(nx - 1, j, k));
        }
        for (int j = g.periodic_y ? 0 : 1; j < ny; ++j) {
            const int jm = j == 0 ? ny - 1 : j - 1;
            for (int i = 0; i < nx; ++i) f.v(i, j, k) -= s * (phi(i, j, k) - phi(i, jm, k));
        }
        if (three_d) {
            const int km = k == 0 ? nz - 1 : k - 1;
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) f.w(i, j, k) -= s * (phi(i, j, k) - phi(i, j, km));
            }
        }
    }
    c = 0;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i, ++c) f.p(i, j, k) += phi_[c];
        }
    }
}

StepInfo FlowSolver::step(FlowField& f, std::span<const double> q, double dt) {
    const auto& g = geom_.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const bool three_d = g.three_d();
    StepInfo info;
    info.dt = dt;

    fill_ghosts(f);
    momentum_rhs(f, hu_, hv_, hw_);

    // Adams-Bashforth weights for a possibly changed step size.
    double a = 1.0, b = 0.0;
    if (f.has_history) {
        const double r = dt / f.dt_prev;
        a = 1.0 + 0.5 * r;
        b = -0.5 * r;
    }
    const double inv_h = 1.0 / g.h;
    const int iu0 = g.periodic_x ? 0 : 1;
    const int jv0 = g.periodic_y ? 0 : 1;

    std::vector<double> outlet;
    if (!g.periodic_x) outlet = convective_outlet(f, dt);

    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = iu0; i < nx; ++i) {
                const double gp = (f.p(i, j, k) - f.p(i - 1, j, k)) * inv_h;
                f.u(i, j, k) += dt * (a * hu_(i, j, k) + b * f.hu(i, j, k) - gp);
            }
        }
        for (int j = jv0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double gp = (f.p(i, j, k) - f.p(i, j - 1, k)) * inv_h;
                f.v(i, j, k) += dt * (a * hv_(i, j, k) + b * f.hv(i, j, k) - gp);
            }
        }
        if (three_d) {
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const double gp = (f.p(i, j, k) - f.p(i, j, k - 1)) * inv_h;
                    f.w(i, j, k) += dt * (a * hw_(i, j, k) + b * f.hw(i, j, k) - gp);
                }
            }
        }
    }
    if (!g.periodic_x) outlet_and_walls(f, outlet);
    fill_ghosts(f);

    apply_forcing(f, q, dt);
    if (g.three_d() || g.periodic_x || g.periodic_y) fill_ghosts(f);
    project(f, dt, info);
    fill_ghosts(f);

    std::swap(f.hu, hu_);
    std::swap(f.hv, hv_);
    if (three_d) std::swap(f.hw, hw_);
    f.has_history = true;
    f.dt_prev = dt;
    f.t += dt;

    if (!std::isfinite(max_speed(f))) {
        std::ostringstream msg;
        msg << "non-finite velocity at t=" << f.t;
        throw NumericalError(msg.str());
    }
    if (check_divergence) info.max_divergence = max_divergence(f);
    return info;
}

double FlowSolver::max_divergence(const FlowField& f) const {
    const auto& g = geom_.grid;
    double m = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double d = f.u(i + 1, j, k) - f.u(i, j, k) + f.v(i, j + 1, k) - f.v(i, j, k);
                if (g.three_d()) d += f.w(i, j, k + 1) - f.w(i, j, k);
                m = std::max(m, std::abs(d) / g.h);
            }
        }
    }
    return m;
}

double FlowSolver::net_jet_flux(std::span<const double> q) const {
    double q_mean = 0.0;
    if (!q.empty()) q_mean = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());
    double top = 0.0, bottom = 0.0;
    const double ds = geom_.marker_arc();
    for (const auto& mk : geom_.markers) {
        if (mk.jet == JetSide::None) continue;
        const Velocity2 d = jet_velocity(q_mean, mk.angle, geom_.jets);
        const double radial = d.u * std::cos(mk.angle) + d.v * std::sin(mk.angle);
        (mk.jet == JetSide::Top ? top : bottom) += SimConfig::rho * radial * ds;
    }
    return top + bottom;
}

}  // namespace afc::flow
