#include "afc/orchestrator/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/log.hpp"
#include "afc/orchestrator/simulation.hpp"

namespace afc::orchestrator {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Runs until t >= t_end in chunks, stopping exactly at t_end.
void run_until(Simulation& sim, double t_end, double chunk, const StepObserver& obs) {
    const std::vector<double> zero(static_cast<std::size_t>(sim.n_pe()), 0.0);
    while (sim.field().t < t_end - 1e-9) {
        sim.advance(zero, std::min(chunk, t_end - sim.field().t), obs);
    }
}

}  // namespace

BaselineResult run_baseline(const flow::SimConfig& sim_cfg, const flow::JetConfig& jets, const BaselineConfig& cfg) {
    if (cfg.snapshots < 1) throw ConfigError("baseline needs at least one snapshot");
    if (!(cfg.t_record > 0.0)) throw ConfigError("baseline record window must be positive");
    Simulation sim(sim_cfg, jets);
    sim.reset_perturbed(cfg.perturbation);

    BaselineResult out;
    run_until(sim, cfg.t_transient, cfg.chunk, [&](const auto&, const auto&, auto) { ++out.steps; });
    log::info("baseline transient done at t = " + std::to_string(sim.field().t));

    flow::CpProfile cp_sum;
    long cp_samples = 0;
    run_until(sim, cfg.t_transient + cfg.t_record, cfg.chunk,
              [&](const flow::FlowField& f, const flow::ForceRecord& r, auto) {
                  ++out.steps;
                  out.trace.t.push_back(f.t);
                  out.trace.cd.push_back(r.pe[0].cd);
                  out.trace.cl.push_back(r.pe[0].cl);
                  out.trace.cd_press.push_back(r.pe[0].cd_press);
                  out.trace.cd_visc.push_back(r.pe[0].cd_visc);
                  auto cp = flow::compute_cp(f, sim.geometry());
                  if (cp_samples++ == 0) {
                      cp_sum = std::move(cp);
                  } else {
                      for (std::size_t i = 0; i < cp.cp.size(); ++i) cp_sum.cp[i] += cp.cp[i];
                  }
              });
    for (double& c : cp_sum.cp) c /= static_cast<double>(cp_samples);
    out.cp = std::move(cp_sum);

    const auto cl = resample(out.trace.t, out.trace.cl, cfg.sample_dt);
    const SignalStats cl_stats = signal_statistics(cl, cfg.sample_dt, 0.15, 8.0);
    if (!cl_stats.has_peak) throw ConfigError("no periodic vortex shedding detected in the baseline lift signal");
    out.spectrum = power_spectrum(cl, cfg.sample_dt);

    BaselineStats& s = out.stats;
    s.mean_cl = cl_stats.mean;
    s.sigma_cl = cl_stats.sigma;
    s.st = cl_stats.st;
    s.mean_cd = mean_of(resample(out.trace.t, out.trace.cd, cfg.sample_dt));
    s.cd_press = mean_of(resample(out.trace.t, out.trace.cd_press, cfg.sample_dt));
    s.cd_visc = mean_of(resample(out.trace.t, out.trace.cd_visc, cfg.sample_dt));
    const std::size_t half = cl.size() / 2;
    const auto first = std::span(cl).first(half);
    const auto second = std::span(cl).subspan(half);
    s.st_first_half = signal_statistics(first, cfg.sample_dt, 0.0, 0.0).st;
    s.st_second_half = signal_statistics(second, cfg.sample_dt, 0.0, 0.0).st;

    const double period = 1.0 / s.st;
    const double t_start = sim.field().t;
    for (int k = 0; k < cfg.snapshots; ++k) {
        const double phase = static_cast<double>(k) / cfg.snapshots;
        run_until(sim, t_start + phase * period, cfg.chunk, [&](const auto&, const auto&, auto) { ++out.steps; });
        out.snapshots.push_back(sim.snapshot());
        out.snapshot_phase.push_back(phase);
    }
    std::ostringstream msg;
    msg << "baseline: Cd " << s.mean_cd << " sigma_Cl " << s.sigma_cl << " St " << s.st;
    log::info(msg.str());
    return out;
}

}  // namespace afc::orchestrator
