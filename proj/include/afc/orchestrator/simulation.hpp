#pragma once

#include <functional>
#include <span>
#include <vector>

#include "afc/flow/diagnostics.hpp"

namespace afc::orchestrator {

/// Called after every solver substep with the applied per-pe flow rates.
using StepObserver = std::function<void(const flow::FlowField&, const flow::ForceRecord&, std::span<const double> q)>;

/// Per pseudo-environment averages over one actuation interval.
struct IntervalResult {
    std::vector<double> cd;
    std::vector<double> cl;
};

/// One CFD instance driven by piecewise-linear actuation.
class Simulation {
public:
    Simulation(const flow::SimConfig& sim, const flow::JetConfig& jets);

    flow::FlowSolver& solver() { return solver_; }
    const flow::DomainGeometry& geometry() const { return solver_.geometry(); }
    flow::FlowField& field() { return field_; }
    const flow::FlowField& field() const { return field_; }
    const std::vector<double>& q() const { return q_; }
    int n_pe() const { return geometry().sim.n_pe; }

    /// Uniform stream plus a small asymmetric v bump behind the cylinder
    /// that triggers shedding.
    void reset_perturbed(double amplitude);
    /// Restores a checkpoint; actuation restarts from zero.
    void load_snapshot(std::span<const std::uint8_t> bytes);
    std::vector<std::uint8_t> snapshot() const;

    /// 255-entry observation per pseudo-environment.
    std::vector<std::vector<double>> observe() const;

    /// Advances `duration` in equal substeps no larger than the stable step,
    /// ramping each pe's flow rate linearly from its current value to `target`.
    /// Force averages weight every substep equally.
    IntervalResult advance(std::span<const double> target, double duration, const StepObserver& observer = {});

private:
    flow::FlowSolver solver_;
    flow::FlowField field_;
    flow::WitnessLayout layout_;
    std::vector<double> q_;
};

}  // namespace afc::orchestrator
