#pragma once

#include <array>
#include <vector>

#include "afc/flow/solver.hpp"

namespace afc::flow {

/// Force coefficients of one pseudo-environment, normalised by
/// 0.5 * rho * U_inf^2 * L_jet * D.
struct Coefficients {
    double cd = 0.0, cl = 0.0;
    double cd_press = 0.0, cd_visc = 0.0;
    double cl_press = 0.0, cl_visc = 0.0;
};

struct ForceRecord {
    double t = 0.0;
    std::vector<Coefficients> pe;
};

/// Pressure and viscous surface integrals evaluated on a ring of sample
/// points just outside the forcing band. In 2D the single slice is
/// replicated to every pseudo-environment.
ForceRecord compute_forces(const FlowField& field, const DomainGeometry& geom);

/// Mean pressure over the inlet plane; the gauge for every Cp.
double reference_pressure(const FlowField& field, const DomainGeometry& geom);

struct WitnessLayout {
    std::vector<std::array<double, 2>> points;  ///< absolute xy coordinates

    static constexpr std::size_t count = 85;
    static constexpr std::size_t observation_size = 3 * count;
};

/// Three rings of 24 probes at r = 0.6, 0.8, 1.0 D (offset half a spacing
/// from the centreline) plus 13 wake-centreline probes at x/D = 0.75 .. 3.75.
WitnessLayout default_witness_layout(const DomainGeometry& geom);

/// Per pseudo-environment observation: Cp at the 85 probes of its left
/// neighbour, itself and its right neighbour (spanwise periodic).
std::vector<std::vector<double>> sample_witness(const FlowField& field, const DomainGeometry& geom,
                                                const WitnessLayout& layout);

struct CpProfile {
    std::vector<double> theta_deg;  ///< measured from the front stagnation point, through the top
    std::vector<double> cp;
};

CpProfile compute_cp(const FlowField& field, const DomainGeometry& geom);

/// Bilinear interpolation of a staggered array whose index (i, j) sits at
/// ((i + ox) h, (j + oy) h).
double interpolate(const Array3& a, double h, double ox, double oy, double x, double y, int k = 0);

}  // namespace afc::flow
