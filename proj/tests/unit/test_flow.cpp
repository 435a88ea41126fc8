#include <cmath>
#include <numbers>

#include "doctest.h"

#include "../support/flow_cases.hpp"
#include "afc/errors.hpp"
#include "afc/flow/checkpoint.hpp"
#include "afc/flow/diagnostics.hpp"
#include "afc/flow/jets.hpp"
#include "afc/flow/solver.hpp"

using namespace afc;
using namespace afc::flow;

namespace {
constexpr double deg = std::numbers::pi / 180.0;

double top_arc_flux(double q, const JetConfig& jets, int panels) {
    const double omega = jets.omega_deg * deg;
    const double a = jets.theta_top_deg * deg - 0.5 * omega;
    const double dtheta = omega / panels;
    double sum = 0.0;
    for (int n = 0; n < panels; ++n) {
        const double th = a + (n + 0.5) * dtheta;
        const Velocity2 vel = jet_velocity(q, th, jets);
        const double radial = vel.u * std::cos(th) + vel.v * std::sin(th);
        sum += radial * SimConfig::rho * 0.5 * SimConfig::diameter * dtheta;
    }
    return sum;
}
}  // namespace

TEST_CASE("build_domain: desk grid dimensions and markers") {
    SimConfig sim;
    const auto geom = build_domain(sim, JetConfig{});
    CHECK(geom.grid.nx == 750);
    CHECK(geom.grid.ny == 375);
    CHECK(geom.grid.nz == 1);
    REQUIRE(geom.markers.size() == 360);
    const double spacing = std::hypot(geom.markers[1].x - geom.markers[0].x, geom.markers[1].y - geom.markers[0].y);
    CHECK(spacing == doctest::Approx(2.0 * std::numbers::pi * 0.5 / 360).epsilon(1e-3));
    CHECK(spacing == doctest::Approx(0.0087).epsilon(0.01));
    for (const auto& m : geom.markers) {
        CHECK(std::abs(std::hypot(m.x - 7.5, m.y - 7.5) - 0.5) < geom.grid.h);
    }
    int top = 0, bottom = 0;
    for (const auto& m : geom.markers) {
        top += m.jet == JetSide::Top;
        bottom += m.jet == JetSide::Bottom;
    }
    CHECK(top == 11);  // 85..95 degrees inclusive
    CHECK(bottom == 11);
}

TEST_CASE("build_domain: insufficient clearance is a configuration error") {
    SimConfig sim;
    sim.center = {0.4, 7.5};
    CHECK_THROWS_AS(build_domain(sim, JetConfig{}), ConfigError);
    sim.center = {7.5, 2.0};
    CHECK_THROWS_AS(build_domain(sim, JetConfig{}), ConfigError);
    sim.center = {7.5, 7.5};
    sim.h = 0.07;  // does not tile 30 x 15
    CHECK_THROWS_AS(build_domain(sim, JetConfig{}), ConfigError);
}

TEST_CASE("jet_velocity: profile values") {
    JetConfig jets;
    const double omega = 10.0 * deg;
    const auto centre = jet_velocity(0.1, 90.0 * deg, jets);
    CHECK(centre.v == doctest::Approx(0.1 * std::numbers::pi / omega).epsilon(1e-12));
    CHECK(centre.v == doctest::Approx(1.8).epsilon(1e-3));
    CHECK(std::abs(centre.u) < 1e-15);

    const auto edge = jet_velocity(0.1, 95.0 * deg, jets);
    CHECK(std::hypot(edge.u, edge.v) < 1e-14);

    const auto bottom = jet_velocity(0.1, 270.0 * deg, jets);
    // radial component is negative (suction) with the same magnitude
    const double radial = bottom.u * std::cos(270.0 * deg) + bottom.v * std::sin(270.0 * deg);
    CHECK(radial == doctest::Approx(-centre.v).epsilon(1e-12));

    const auto outside = jet_velocity(0.1, 0.0, jets);
    CHECK(outside.u == 0.0);
    CHECK(outside.v == 0.0);
}

TEST_CASE("jet_velocity: quadrature mass flux equals Q") {
    JetConfig jets;
    for (double q : {0.176, 0.1, 0.01, -0.05}) {
        const double flux = top_arc_flux(q, jets, 200000);
        CHECK(std::abs(flux - q) <= 1e-6 * std::abs(q));
    }
}

TEST_CASE("JetAction: linear ramp and clamping") {
    JetConfig jets;
    JetAction a({0.0}, {0.1}, 2.0, 1.0, jets);
    CHECK(a.at(2.0)[0] == 0.0);
    CHECK(a.at(2.5)[0] == doctest::Approx(0.05));
    CHECK(a.at(3.0)[0] == doctest::Approx(0.1));
    CHECK(a.at(10.0)[0] == doctest::Approx(0.1));
    JetAction big({0.0}, {5.0}, 0.0, 1.0, jets);
    CHECK(big.end()[0] == jets.q_max);
}

TEST_CASE("step: uniform flow without a body is an exact equilibrium") {
    auto sim = testing::small_cylinder_config();
    sim.with_cylinder = false;
    FlowSolver solver(build_domain(sim, JetConfig{}));
    auto f = solver.uniform_field();
    const auto initial = f;
    for (int n = 0; n < 10; ++n) solver.step(f, {}, 0.02);
    CHECK(f.u == initial.u);
    CHECK(f.v == initial.v);
    CHECK(f.p == initial.p);
}

TEST_CASE("step: Taylor-Green kinetic energy decay") {
    const double h = 1.0 / 64.0;
    FlowSolver solver(build_domain(testing::taylor_green_config(h), JetConfig{}));
    testing::TaylorGreen tg{solver.geometry().sim.nu()};
    auto f = testing::taylor_green_field(solver, tg);
    const double e0 = testing::kinetic_energy(f, solver.grid());
    const int steps = 640;
    for (int n = 0; n < steps; ++n) solver.step(f, {}, 1.0 / steps);
    const double e1 = testing::kinetic_energy(f, solver.grid());
    const double k = 2.0 * std::numbers::pi;
    const double expected = std::exp(-4.0 * tg.nu * k * k * 1.0);
    CHECK(std::abs(e1 / e0 - expected) / expected < 0.01);
}

TEST_CASE("compute_forces: constant pressure and rest give zero coefficients") {
    FlowSolver solver(build_domain(testing::small_cylinder_config(), JetConfig{}));
    auto f = solver.make_field();
    f.p.fill(3.25);
    const auto rec = compute_forces(f, solver.geometry());
    REQUIRE(rec.pe.size() == 1);
    CHECK(std::abs(rec.pe[0].cd) < 1e-12);
    CHECK(std::abs(rec.pe[0].cl) < 1e-12);
    CHECK(rec.pe[0].cd == rec.pe[0].cd_press + rec.pe[0].cd_visc);
}

TEST_CASE("compute_forces: symmetric start gives zero lift after one step") {
    FlowSolver solver(build_domain(testing::small_cylinder_config(), JetConfig{}));
    auto f = solver.uniform_field();
    solver.step(f, std::vector<double>{0.0}, solver.stable_dt(f));
    const auto rec = compute_forces(f, solver.geometry());
    CHECK(std::abs(rec.pe[0].cl) < 1e-10);
    CHECK(rec.pe[0].cd > 0.0);
    CHECK(rec.pe[0].cd == rec.pe[0].cd_press + rec.pe[0].cd_visc);
    CHECK(rec.pe[0].cl == rec.pe[0].cl_press + rec.pe[0].cl_visc);
}

TEST_CASE("compute_cp: potential flow stagnation and gauge") {
    SimConfig sim;  // desk grid, for interpolation resolution
    FlowSolver solver(build_domain(sim, JetConfig{}));
    const auto& geom = solver.geometry();
    auto f = solver.make_field();
    const double r2 = geom.radius * geom.radius;
    auto potential = [&](double x, double y) {
        const double dx = x - geom.cx, dy = y - geom.cy;
        const double rr = dx * dx + dy * dy;
        const double c2 = (dx * dx - dy * dy) / rr, s2 = 2.0 * dx * dy / rr;
        return std::array<double, 2>{1.0 - r2 / rr * c2, -r2 / rr * s2};
    };
    const auto& g = geom.grid;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto vel = potential((i + 0.5) * g.h, (j + 0.5) * g.h);
            f.p(i, j) = 0.5 * (1.0 - vel[0] * vel[0] - vel[1] * vel[1]);
        }
    }
    solver.fill_ghosts(f);
    const auto cp = compute_cp(f, geom);
    REQUIRE(cp.cp.size() == 360);
    CHECK(cp.theta_deg[0] == 0.0);
    CHECK(std::abs(cp.cp[0] - 1.0) < 0.05);
    // shoulder: analytic 1 - 4 sin^2(90) = -3 on the wall; the offset ring sees less suction
    CHECK(cp.cp[90] < -2.0);

    auto zero = solver.make_field();
    zero.p.fill(0.7);
    for (double c : compute_cp(zero, geom).cp) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("sample_witness: layout and neighbour stacking") {
    auto sim = testing::small_cylinder_config();
    sim.n_pe = 10;
    FlowSolver solver(build_domain(sim, JetConfig{}));
    const auto layout = default_witness_layout(solver.geometry());
    CHECK(layout.points.size() == 85);
    auto f = solver.uniform_field();
    f.p.fill(-0.3);
    const auto obs = sample_witness(f, solver.geometry(), layout);
    REQUIRE(obs.size() == 10);
    for (const auto& o : obs) {
        REQUIRE(o.size() == 255);
        for (double c : o) CHECK(std::abs(c) < 1e-14);
    }

    sim.n_pe = 1;
    FlowSolver single(build_domain(sim, JetConfig{}));
    auto g = single.uniform_field();
    for (int n = 0; n < 5; ++n) single.step(g, std::vector<double>{0.05}, 0.02);
    const auto o1 = sample_witness(g, single.geometry(), layout)[0];
    for (std::size_t i = 0; i < 85; ++i) {
        CHECK(o1[i] == o1[85 + i]);
        CHECK(o1[i] == o1[170 + i]);
    }
}

TEST_CASE("jets: top and bottom flux cancel") {
    FlowSolver solver(build_domain(testing::small_cylinder_config(), JetConfig{}));
    for (double q : {0.176, -0.1, 0.0123}) {
        CHECK(std::abs(solver.net_jet_flux(std::vector<double>{q})) < 1e-15);
    }
}

TEST_CASE("checkpoint: round trip and error paths") {
    FlowSolver solver(build_domain(testing::small_cylinder_config(), JetConfig{}));
    auto f = solver.uniform_field();
    for (int n = 0; n < 3; ++n) solver.step(f, std::vector<double>{0.02}, 0.02);
    const auto bytes = save_checkpoint(f, solver.grid());
    CHECK(bytes[0] == 'A');
    CHECK(bytes[3] == 'S');
    const auto g = load_checkpoint(bytes, solver);
    CHECK(g == f);

    // continuing from the restored state is bit-identical
    auto a = f, b = g;
    solver.step(a, std::vector<double>{0.01}, 0.02);
    solver.step(b, std::vector<double>{0.01}, 0.02);
    CHECK(a == b);

    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    try {
        load_checkpoint(truncated, solver);
        FAIL("expected failure");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointError::Kind::Corrupt);
    }

    auto flipped = bytes;
    flipped[100] ^= 0x10;
    CHECK_THROWS_AS(load_checkpoint(flipped, solver), CheckpointError);

    auto versioned = bytes;
    versioned[4] = 9;
    try {
        load_checkpoint(versioned, solver);
        FAIL("expected failure");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointError::Kind::VersionMismatch);
    }

    auto other = testing::small_cylinder_config();
    other.lx = 9.0;
    FlowSolver wider(build_domain(other, JetConfig{}));
    try {
        load_checkpoint(bytes, wider);
        FAIL("expected failure");
    } catch (const CheckpointError& e) {
        CHECK(e.kind() == CheckpointError::Kind::ShapeMismatch);
    }
}

TEST_CASE("step: zero actuation matches the jet-free solver") {
    auto sim = testing::small_cylinder_config();
    JetConfig with;
    JetConfig without;
    without.enabled = false;
    FlowSolver a(build_domain(sim, with));
    FlowSolver b(build_domain(sim, without));
    auto fa = a.uniform_field();
    auto fb = b.uniform_field();
    for (int n = 0; n < 100; ++n) {
        a.step(fa, std::vector<double>{0.0}, 0.02);
        b.step(fb, {}, 0.02);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < fa.u.raw().size(); ++i) diff = std::max(diff, std::abs(fa.u.raw()[i] - fb.u.raw()[i]));
    CHECK(diff <= 1e-10);
}

TEST_CASE("poisson: jacobi and spectral preconditioners agree") {
    auto sim = testing::small_cylinder_config();
    FlowSolver spectral(build_domain(sim, JetConfig{}));
    sim.spectral_preconditioner = false;
    sim.poisson_max_iterations = 5000;
    FlowSolver jacobi(build_domain(sim, JetConfig{}));
    auto fa = spectral.uniform_field();
    auto fb = jacobi.uniform_field();
    for (int n = 0; n < 5; ++n) {
        spectral.step(fa, std::vector<double>{0.05}, 0.02);
        jacobi.step(fb, std::vector<double>{0.05}, 0.02);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < fa.u.raw().size(); ++i) diff = std::max(diff, std::abs(fa.u.raw()[i] - fb.u.raw()[i]));
    CHECK(diff < 1e-4);
}

TEST_CASE("poisson: non-convergence is a numerical error") {
    PoissonSolver s(16, 16, 1, 0.1, {AxisBc::NeumannDirichlet, AxisBc::NeumannNeumann, AxisBc::Periodic},
                    PoissonSolver::Preconditioner::Jacobi, 2, 1e-12);
    std::vector<double> b(256), x(256, 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.37 * static_cast<double>(i));
    CHECK_THROWS_AS(s.solve(b, x), NumericalError);
}

TEST_CASE("step: 3D spanwise-periodic mode runs and stays divergence free") {
    auto sim = testing::small_cylinder_config();
    sim.h = 0.2;
    sim.three_d = true;
    sim.n_pe = 2;
    FlowSolver solver(build_domain(sim, JetConfig{}));
    CHECK(solver.grid().nz == 4);
    solver.check_divergence = true;
    auto f = solver.uniform_field();
    for (int n = 0; n < 20; ++n) {
        const auto info = solver.step(f, std::vector<double>{0.05, -0.05}, 0.04);
        CHECK(info.max_divergence <= 1e-5);
    }
    const auto rec = compute_forces(f, solver.geometry());
    REQUIRE(rec.pe.size() == 2);
    // opposite actuation on the two spanwise slabs lifts them in opposite directions
    CHECK(rec.pe[0].cl * rec.pe[1].cl < 0.0);
    const auto obs = sample_witness(f, solver.geometry(), default_witness_layout(solver.geometry()));
    CHECK(obs[0].size() == 255);
}
