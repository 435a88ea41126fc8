#include "afc/orchestrator/simulation.hpp"

#include <cmath>

#include "afc/errors.hpp"
#include "afc/flow/checkpoint.hpp"
#include "afc/flow/jets.hpp"

namespace afc::orchestrator {

Simulation::Simulation(const flow::SimConfig& sim, const flow::JetConfig& jets)
    : solver_(flow::build_domain(sim, jets)), field_(solver_.uniform_field()),
      layout_(flow::default_witness_layout(solver_.geometry())),
      q_(static_cast<std::size_t>(sim.n_pe), 0.0) {}

void Simulation::reset_perturbed(double amplitude) {
    field_ = solver_.uniform_field();
    const auto& g = solver_.grid();
    const auto& geo = solver_.geometry();
    for (int k = 0; k < field_.v.nk(); ++k) {
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double x = (i + 0.5) * g.h - geo.cx - 1.5;
                const double y = j * g.h - geo.cy;
                field_.v(i, j, k) += amplitude * std::exp(-(x * x + y * y) / 0.25);
            }
        }
    }
    solver_.fill_ghosts(field_);
    std::fill(q_.begin(), q_.end(), 0.0);
}

void Simulation::load_snapshot(std::span<const std::uint8_t> bytes) {
    field_ = flow::load_checkpoint(bytes, solver_);
    std::fill(q_.begin(), q_.end(), 0.0);
}

std::vector<std::uint8_t> Simulation::snapshot() const { return flow::save_checkpoint(field_, solver_.grid()); }

std::vector<std::vector<double>> Simulation::observe() const {
    return flow::sample_witness(field_, solver_.geometry(), layout_);
}

IntervalResult Simulation::advance(std::span<const double> target, double duration, const StepObserver& observer) {
    if (target.size() != q_.size()) throw ConfigError("one flow rate per pseudo-environment expected");
    if (!(duration > 0.0)) throw ConfigError("interval duration must be positive");
    const flow::JetAction ramp(q_, std::vector<double>(target.begin(), target.end()), field_.t, duration,
                               geometry().jets);
    const double t0 = field_.t;
    const auto n = static_cast<long>(std::ceil(duration / solver_.stable_dt(field_) - 1e-9));
    const double dt = duration / static_cast<double>(n);

    const std::size_t n_pe = q_.size();
    IntervalResult out{std::vector<double>(n_pe, 0.0), std::vector<double>(n_pe, 0.0)};
    for (long s = 1; s <= n; ++s) {
        const auto q = ramp.at(t0 + dt * static_cast<double>(s));
        solver_.step(field_, q, dt);
        const auto forces = flow::compute_forces(field_, solver_.geometry());
        for (std::size_t p = 0; p < n_pe; ++p) {
            out.cd[p] += forces.pe[p].cd;
            out.cl[p] += forces.pe[p].cl;
        }
        if (observer) observer(field_, forces, q);
    }
    // land exactly on the interval end despite rounding in the sum of dt
    field_.t = t0 + duration;
    for (std::size_t p = 0; p < n_pe; ++p) {
        out.cd[p] /= static_cast<double>(n);
        out.cl[p] /= static_cast<double>(n);
    }
    q_ = ramp.end();
    return out;
}

}  // namespace afc::orchestrator
