#pragma once

#include <span>
#include <vector>

#include "afc/agent/policy.hpp"
#include "afc/flow/diagnostics.hpp"
#include "afc/orchestrator/baseline.hpp"
#include "afc/orchestrator/config.hpp"
#include "afc/orchestrator/signal.hpp"
#include "afc/orchestrator/trainer.hpp"

namespace afc::orchestrator {

struct EvalResult {
    bool converged = false;
    double t_steady = 0.0;  ///< controlled time at which the drift rule was met
    double t_end = 0.0;
    SignalStats cl;
    double mean_cd = 0.0;
    double cd_press = 0.0;
    double cd_visc = 0.0;
    SignalStats q;         ///< actuation statistics, pe 0
    Spectrum q_spectrum;   ///< actuation spectrum, pe 0
    flow::CpProfile cp;    ///< averaged over the statistics window
    Trace trace;           ///< whole run, time measured from actuation onset
    std::vector<double> window_cd;  ///< steadiness window means

    double cd_reduction(double cd_b) const { return 100.0 * (cd_b - mean_cd) / cd_b; }
    double sigma_cl_reduction(double sigma_b) const { return 100.0 * (sigma_b - cl.sigma) / sigma_b; }
};

/// Runs deterministic actions from a baseline snapshot until the mean Cd of
/// consecutive windows drifts by less than the tolerance, then gathers
/// statistics over a further window. Without convergence the statistics
/// cover the last stats window of the run and `converged` is false.
EvalResult evaluate_deterministic(const agent::PolicyParams<float>& params, const RunConfig& cfg,
                                  const BaselineStats& baseline, std::span<const std::uint8_t> snapshot);

}  // namespace afc::orchestrator
