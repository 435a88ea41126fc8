#pragma once

#include <span>
#include <vector>

#include "afc/flow/array.hpp"
#include "afc/flow/geometry.hpp"
#include "afc/flow/poisson.hpp"

namespace afc::flow {

/// Staggered (MAC) state. u lives on x-faces, v on y-faces, w on z-faces and
/// p at cell centres; every array carries one ghost layer (none along z in 2D).
/// The Adams-Bashforth history travels with the state so a restored
/// checkpoint continues bit-for-bit.
struct FlowField {
    Array3 u, v, w, p;
    Array3 hu, hv, hw;
    double t = 0.0;
    double dt_prev = 0.0;
    bool has_history = false;

    bool operator==(const FlowField&) const = default;
};

struct StepInfo {
    double dt = 0.0;
    int poisson_iterations = 0;
    double poisson_residual = 0.0;
    double max_divergence = 0.0;
};

/// Fractional-step incompressible Navier-Stokes solver: explicit AB2
/// advection and diffusion, multi-direct-forcing immersed boundary on the
/// cylinder markers, incremental pressure projection.
class FlowSolver {
public:
    explicit FlowSolver(DomainGeometry geometry);

    const DomainGeometry& geometry() const { return geom_; }
    const Grid& grid() const { return geom_.grid; }

    /// Zero field with correctly shaped arrays.
    FlowField make_field() const;
    /// u = U_inf everywhere, boundary conditions applied.
    FlowField uniform_field() const;

    /// Largest step honouring the CFL target and the explicit diffusion limit.
    double stable_dt(const FlowField& field) const;

    /// Advances one step. `q` holds per-pseudo-environment jet flow rates at
    /// the end of the step; in 2D their mean drives the single jet pair.
    /// Throws NumericalError on Poisson failure or non-finite state.
    StepInfo step(FlowField& field, std::span<const double> q, double dt);

    /// Refreshes ghost values from the interior and boundary conditions.
    void fill_ghosts(FlowField& field) const;

    /// Max |div u| over all cells (units U_inf / D).
    double max_divergence(const FlowField& field) const;
    /// Sum of face flow rates through the top and bottom jet arcs (2D, per unit span).
    double net_jet_flux(std::span<const double> q) const;

    bool check_divergence = false;  ///< record max_divergence in StepInfo

private:
    struct Stencil {
        std::vector<std::ptrdiff_t> offset;  // into an xy-plane of the target array
        std::vector<double> weight;
    };

    void momentum_rhs(const FlowField& f, Array3& hu, Array3& hv, Array3& hw) const;
    void apply_forcing(FlowField& f, std::span<const double> q, double dt);
    void project(FlowField& f, double dt, StepInfo& info);
    std::vector<double> convective_outlet(const FlowField& f, double dt) const;
    void outlet_and_walls(FlowField& f, const std::vector<double>& outlet) const;
    double max_speed(const FlowField& f) const;
    Stencil make_stencil(double x, double y, double ox, double oy, const Array3& a) const;

    DomainGeometry geom_;
    PoissonSolver poisson_;
    std::vector<double> rhs_, phi_;
    Array3 hu_, hv_, hw_;
    std::vector<Stencil> u_stencils_, v_stencils_, w_stencils_;
    std::vector<double> marker_desired_u_, marker_desired_v_;
};

/// Roma et al. three-point regularised delta kernel (argument in grid units).
double roma_kernel(double r);

}  // namespace afc::flow
