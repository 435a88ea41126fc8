#pragma once

#include <cstdint>
#include <vector>

#include "afc/flow/diagnostics.hpp"
#include "afc/orchestrator/signal.hpp"

namespace afc::orchestrator {

struct BaselineConfig {
    double t_transient = 100.0;  ///< discarded start-up time
    double t_record = 120.0;     ///< analysis window after the transient
    int snapshots = 8;           ///< phase-distinct restart states
    double perturbation = 0.2;   ///< amplitude of the initial v bump
    double sample_dt = 0.05;     ///< uniform resampling step for spectra
    double chunk = 1.0;          ///< advance granularity
};

/// Time series sampled at every solver substep (pe 0 only; 2D replicates it).
struct ForceTrace {
    std::vector<double> t;
    std::vector<double> cd, cl, cd_press, cd_visc;
};

struct BaselineStats {
    double mean_cl = 0.0;
    double sigma_cl = 0.0;
    double st = 0.0;
    double mean_cd = 0.0;
    double cd_press = 0.0;
    double cd_visc = 0.0;
    /// Strouhal number of each half of the record window.
    double st_first_half = 0.0;
    double st_second_half = 0.0;
};

struct BaselineResult {
    BaselineStats stats;
    ForceTrace trace;
    flow::CpProfile cp;  ///< time average over the record window
    Spectrum spectrum;   ///< Cl spectrum over the record window
    std::vector<std::vector<std::uint8_t>> snapshots;
    std::vector<double> snapshot_phase;  ///< fraction of a shedding period
    long steps = 0;
};

/// Runs the uncontrolled flow through the transient and the record window,
/// then saves `snapshots` states evenly spread over one further shedding
/// period. Throws ConfigError when no shedding peak is found.
BaselineResult run_baseline(const flow::SimConfig& sim, const flow::JetConfig& jets, const BaselineConfig& cfg);

}  // namespace afc::orchestrator
