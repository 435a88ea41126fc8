#include "afc/orchestrator/evaluate.hpp"

#include <cmath>
#include <numeric>

#include "afc/errors.hpp"
#include "afc/log.hpp"
#include "afc/orchestrator/simulation.hpp"

namespace afc::orchestrator {

namespace {

struct Sample {
    double t, cd, cd_press, cd_visc, cl, q;
};

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

EvalResult evaluate_deterministic(const agent::PolicyParams<float>& params, const RunConfig& cfg,
                                  const BaselineStats& baseline, std::span<const std::uint8_t> snapshot) {
    const int n_pe = cfg.sim.n_pe;
    const double period = 1.0 / baseline.st;
    const double t_action = episode_duration(cfg.train, baseline.st) / cfg.train.actions_per_episode;
    const double window = cfg.eval.window_periods * period;
    const double stats_len = cfg.eval.stats_periods * period;

    Simulation sim(cfg.sim, cfg.jets);
    sim.load_snapshot(snapshot);
    const std::vector<double> zero(static_cast<std::size_t>(n_pe), 0.0);
    while (sim.field().t < cfg.eval.onset - 1e-9) sim.advance(zero, std::min(t_action, cfg.eval.onset - sim.field().t));
    sim.field().t = 0.0;

    EvalResult out;
    out.trace.n_pe = n_pe;
    std::vector<Sample> samples;
    bool in_stats = false;
    flow::CpProfile cp_sum;
    long cp_count = 0;
    auto record = [&](const flow::FlowField& f, const flow::ForceRecord& r, std::span<const double> q) {
        out.trace.data.push_back(f.t);
        for (int p = 0; p < n_pe; ++p) out.trace.data.push_back(r.pe[p].cd);
        for (int p = 0; p < n_pe; ++p) out.trace.data.push_back(r.pe[p].cl);
        for (int p = 0; p < n_pe; ++p) out.trace.data.push_back(q[p]);
        samples.push_back({f.t, r.pe[0].cd, r.pe[0].cd_press, r.pe[0].cd_visc, r.pe[0].cl, q[0]});
        if (in_stats) {
            auto cp = flow::compute_cp(f, sim.geometry());
            if (cp_count++ == 0) {
                cp_sum = std::move(cp);
            } else {
                for (std::size_t i = 0; i < cp.cp.size(); ++i) cp_sum.cp[i] += cp.cp[i];
            }
        }
    };

    agent::Rng unused(0);
    double window_sum = 0.0;
    long window_n = 0;
    double window_end = window;
    double stats_start = -1.0;
    std::vector<double> q(static_cast<std::size_t>(n_pe));
    while (sim.field().t < cfg.eval.max_duration - 1e-9) {
        const auto obs = sim.observe();
        for (int p = 0; p < n_pe; ++p) {
            q[static_cast<std::size_t>(p)] = agent::act<float>(obs[p], params, agent::ActMode::Deterministic, unused,
                                                              cfg.ppo.q_max).q;
        }
        const std::size_t before = samples.size();
        sim.advance(q, t_action, record);
        for (std::size_t s = before; s < samples.size(); ++s) {
            window_sum += samples[s].cd;
            ++window_n;
        }
        const double t = sim.field().t;
        if (stats_start < 0.0 && t >= window_end - 1e-9) {
            out.window_cd.push_back(window_sum / static_cast<double>(window_n));
            window_sum = 0.0;
            window_n = 0;
            window_end += window;
            const std::size_t k = out.window_cd.size();
            if (k >= 2 && std::abs(out.window_cd[k - 1] - out.window_cd[k - 2]) <=
                              cfg.eval.drift_tolerance * std::abs(out.window_cd[k - 2])) {
                stats_start = t;
                out.t_steady = t;
                in_stats = true;
            }
        }
        if (stats_start >= 0.0 && t >= stats_start + stats_len - 1e-9) {
            out.converged = true;
            break;
        }
    }
    out.t_end = sim.field().t;
    if (!out.converged) {
        stats_start = std::max(0.0, out.t_end - stats_len);
        log::warn("evaluation did not reach steady statistics within the time budget");
    }

    std::vector<double> t, cd, cdp, cdv, cl, qs;
    for (const auto& s : samples) {
        if (s.t < stats_start - 1e-9) continue;
        t.push_back(s.t);
        cd.push_back(s.cd);
        cdp.push_back(s.cd_press);
        cdv.push_back(s.cd_visc);
        cl.push_back(s.cl);
        qs.push_back(s.q);
    }
    const double dt = cfg.baseline.sample_dt;
    const auto cl_u = resample(t, cl, dt);
    const auto q_u = resample(t, qs, dt);
    out.cl = signal_statistics(cl_u, dt, 0.0, 0.0);
    out.q = signal_statistics(q_u, dt, 0.0, 0.0);
    out.q_spectrum = power_spectrum(q_u, dt);
    out.mean_cd = mean_of(resample(t, cd, dt));
    out.cd_press = mean_of(resample(t, cdp, dt));
    out.cd_visc = mean_of(resample(t, cdv, dt));
    if (cp_count > 0) {
        for (double& c : cp_sum.cp) c /= static_cast<double>(cp_count);
        out.cp = std::move(cp_sum);
    } else {
        out.cp = flow::compute_cp(sim.field(), sim.geometry());
    }
    return out;
}

}  // namespace afc::orchestrator
