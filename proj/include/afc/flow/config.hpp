#pragma once

#include <array>

namespace afc::flow {

/// Nondimensional simulation setup. Lengths are in cylinder diameters,
/// velocities in freestream units; D = U_inf = rho = 1 and nu = 1/Re.
struct SimConfig {
    double reynolds = 100.0;
    double lx = 30.0;
    double ly = 15.0;
    std::array<double, 2> center{7.5, 7.5};
    double h = 1.0 / 25.0;
    double cfl = 0.5;
    int n_pe = 1;

    /// Spanwise-periodic 3D mode: the z extent is n_pe * jet span, each
    /// pseudo-environment owning its own jet pair.
    bool three_d = false;

    /// Verification modes. `periodic_box` makes x and y periodic (no inlet,
    /// outlet or walls); `with_cylinder = false` removes the body.
    bool periodic_box = false;
    bool with_cylinder = true;

    /// Multi-direct forcing sweeps per step.
    int forcing_iterations = 3;
    int poisson_max_iterations = 200;
    double poisson_tolerance = 1e-6;
    bool spectral_preconditioner = true;

    static constexpr double u_inf = 1.0;
    static constexpr double rho = 1.0;
    static constexpr double diameter = 1.0;

    double nu() const { return u_inf * diameter / reynolds; }
    double radius() const { return 0.5 * diameter; }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Paired synthetic jets. Angles in degrees, measured counter-clockwise from +x.
struct JetConfig {
    double theta_top_deg = 90.0;
    double theta_bot_deg = 270.0;
    double omega_deg = 10.0;
    double l_jet = 0.4;
    double q_max = 0.176;
    bool enabled = true;

    double q_min() const { return -q_max; }
    void validate() const;
};

}  // namespace afc::flow
