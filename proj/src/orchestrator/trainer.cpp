#include "afc/orchestrator/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "afc/errors.hpp"
#include "afc/log.hpp"
#include "afc/orchestrator/rewards.hpp"
#include "afc/orchestrator/signal.hpp"
#include "afc/orchestrator/worker.hpp"

namespace afc::orchestrator {

std::vector<double> Trace::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = data[r * columns() + c];
    return out;
}

double episode_duration(const TrainConfig& cfg, double baseline_st) {
    if (cfg.t_episode > 0.0) return cfg.t_episode;
    if (!(baseline_st > 0.0)) throw ConfigError("episode length needs a positive baseline Strouhal number");
    return cfg.shedding_periods / baseline_st;
}

Trainer::Trainer(RunConfig config, BaselineStats baseline, int n_snapshots, broker::Client& client,
                 WorkerLauncher& launcher)
    : cfg_(std::move(config)), baseline_(baseline), n_snapshots_(n_snapshots), client_(client), launcher_(launcher),
      params_(agent::PolicyParams<float>::initialised(static_cast<int>(flow::WitnessLayout::observation_size),
                                                      cfg_.ppo.hidden, cfg_.train.seed, cfg_.ppo.init_log_std)),
      adam_(params_.data().size(), cfg_.ppo.learning_rate), policy_rng_(cfg_.train.seed + 1),
      update_rng_(cfg_.train.seed + 2), next_command_(static_cast<std::size_t>(cfg_.train.n_cfd), 0) {
    cfg_.validate();
    if (n_snapshots_ < 1) throw ConfigError("training needs at least one baseline snapshot");
    cd_b_ = cfg_.train.cd_baseline > 0.0 ? cfg_.train.cd_baseline : baseline_.mean_cd;
    t_action_ = episode_duration(cfg_.train, baseline_.st) / cfg_.train.actions_per_episode;
}

std::vector<double> Trainer::wait(const std::string& key, int env, std::size_t expected) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(cfg_.train.worker_timeout_ms);
    for (;;) {
        auto t = client_.get(key, 1000);
        if (t) {
            auto v = t->to_f64();
            if (v.size() != expected) throw WorkerFailure("worker " + std::to_string(env) + " reported a failure");
            return v;
        }
        if (!launcher_.alive(env)) throw WorkerFailure("worker " + std::to_string(env) + " exited");
        if (std::chrono::steady_clock::now() > deadline) {
            throw WorkerFailure("worker " + std::to_string(env) + " timed out on " + key);
        }
    }
}

EpisodeData Trainer::attempt(int episode, int attempt_no) {
    const int n_cfd = cfg_.train.n_cfd;
    const int n_pe = cfg_.sim.n_pe;
    const int n_steps = cfg_.train.actions_per_episode;
    const std::size_t obs_size = flow::WitnessLayout::observation_size;
    const double q_max = cfg_.ppo.q_max;

    std::seed_seq seq{cfg_.train.seed, static_cast<std::uint64_t>(episode), static_cast<std::uint64_t>(attempt_no)};
    std::mt19937_64 snap_rng(seq);
    for (int e = 0; e < n_cfd; ++e) {
        const double snapshot = static_cast<double>(snap_rng() % static_cast<std::uint64_t>(n_snapshots_));
        const double cmd[] = {static_cast<double>(WorkerOp::RunEpisode), static_cast<double>(episode), snapshot,
                              static_cast<double>(n_steps), t_action_};
        client_.put_f64(keys::command(e, next_command_[static_cast<std::size_t>(e)]++), cmd);
    }

    const std::size_t n_traj = static_cast<std::size_t>(n_cfd * n_pe);
    std::vector<std::vector<agent::Transition>> traj(n_traj);
    std::vector<std::vector<double>> values(n_traj);
    EpisodeData out;
    EpisodeStats& st = out.stats;
    st.episode = episode;
    double sum_drag = 0.0, sum_lift = 0.0, sum_agg = 0.0;

    std::vector<double> obs_buf;
    for (int n = 0; n < n_steps; ++n) {
        std::vector<std::vector<double>> obs(n_traj);
        for (int e = 0; e < n_cfd; ++e) {
            for (int p = 0; p < n_pe; ++p) obs[e * n_pe + p] = wait(keys::state(episode, e, p, n), e, obs_size);
        }
        std::vector<agent::ActResult> acts(n_traj);
        for (std::size_t i = 0; i < n_traj; ++i) {
            acts[i] = agent::act<float>(obs[i], params_, agent::ActMode::Stochastic, policy_rng_, q_max);
            const int e = static_cast<int>(i) / n_pe, p = static_cast<int>(i) % n_pe;
            const double q[] = {acts[i].q};
            client_.put_f64(keys::action(episode, e, p, n), q);
        }
        for (int e = 0; e < n_cfd; ++e) {
            std::vector<double> r(static_cast<std::size_t>(n_pe));
            for (int p = 0; p < n_pe; ++p) {
                const auto rc = wait(keys::reward(episode, e, p, n), e, 2);
                const auto terms = local_reward(cd_b_, rc[0], rc[1], cfg_.train.alpha);
                r[static_cast<std::size_t>(p)] = terms.total;
                sum_drag += terms.drag;
                sum_lift += terms.lift;
            }
            const auto R = aggregate_reward(r, cfg_.train.beta);
            for (int p = 0; p < n_pe; ++p) {
                const std::size_t i = static_cast<std::size_t>(e * n_pe + p);
                sum_agg += R[static_cast<std::size_t>(p)];
                traj[i].push_back(agent::Transition{std::move(obs[i]), acts[i].raw, acts[i].log_prob, acts[i].value,
                                                    R[static_cast<std::size_t>(p)], n + 1 == n_steps});
                values[i].push_back(acts[i].value);
            }
        }
    }

    // the episode ends on a time limit, so the last step bootstraps from V(s_N)
    for (int e = 0; e < n_cfd; ++e) {
        for (int p = 0; p < n_pe; ++p) {
            const std::size_t i = static_cast<std::size_t>(e * n_pe + p);
            const auto last = wait(keys::state(episode, e, p, n_steps), e, obs_size);
            const std::vector<float> x(last.begin(), last.end());
            const double bootstrap = static_cast<double>(params_.value(x));
            std::vector<double> rewards;
            for (const auto& t : traj[i]) rewards.push_back(t.reward);
            const auto adv = agent::gae(rewards, values[i], bootstrap, cfg_.ppo.gamma, cfg_.ppo.lambda);
            for (std::size_t s = 0; s < traj[i].size(); ++s) {
                out.transitions.push_back(std::move(traj[i][s]));
                out.env_of.push_back(e);
                out.pe_of.push_back(p);
                out.advantages.push_back(adv.advantages[s]);
                out.returns.push_back(adv.returns[s]);
            }
        }
    }

    auto trace = client_.get(keys::trace(episode, 0), 10000);
    if (!trace) throw WorkerFailure("worker 0 published no trace");
    out.trace.n_pe = n_pe;
    out.trace.data = trace->to_f64();
    client_.del(keys::episode_prefix(episode) + "*");

    const double count = static_cast<double>(n_traj) * n_steps;
    st.drag = sum_drag / count;
    st.lift = sum_lift / count;
    st.total = st.drag + st.lift;
    st.aggregated = sum_agg / count;
    const auto cd = out.trace.column(1);
    const auto cl = out.trace.column(1 + static_cast<std::size_t>(n_pe));
    st.mean_cd = std::accumulate(cd.begin(), cd.end(), 0.0) / static_cast<double>(cd.size());
    st.mean_cl = std::accumulate(cl.begin(), cl.end(), 0.0) / static_cast<double>(cl.size());
    double var = 0.0;
    for (double c : cl) var += (c - st.mean_cl) * (c - st.mean_cl);
    st.sigma_cl = std::sqrt(var / static_cast<double>(cl.size()));
    return out;
}

EpisodeData Trainer::run_episode(int episode) {
    if (!workers_running_) {
        launcher_.start(cfg_.train.n_cfd);
        workers_running_ = true;
    }
    for (int a = 0;; ++a) {
        try {
            auto data = attempt(episode, a);
            data.stats.attempts = a + 1;
            return data;
        } catch (const WorkerFailure& e) {
            if (a >= 1) throw;
            log::warn(std::string("episode ") + std::to_string(episode) + " aborted (" + e.what() + "); retrying");
            // idle workers leave on the shutdown command; kill() handles the rest
            for (int e = 0; e < cfg_.train.n_cfd; ++e) {
                const double cmd[] = {static_cast<double>(WorkerOp::Shutdown)};
                client_.put_f64(keys::command(e, next_command_[static_cast<std::size_t>(e)]++), cmd);
            }
            launcher_.kill();
            client_.del(keys::episode_prefix(episode) + "*");
            client_.del("ctl.*");
            std::fill(next_command_.begin(), next_command_.end(), 0);
            launcher_.start(cfg_.train.n_cfd);
        }
    }
}

void Trainer::shutdown_workers() {
    if (!workers_running_) return;
    for (int e = 0; e < cfg_.train.n_cfd; ++e) {
        const double cmd[] = {static_cast<double>(WorkerOp::Shutdown)};
        client_.put_f64(keys::command(e, next_command_[static_cast<std::size_t>(e)]++), cmd);
    }
    launcher_.stop();
    client_.del("ctl.*");
    workers_running_ = false;
}

std::vector<EpisodeStats> Trainer::train(const EpisodeCallback& on_episode) {
    std::vector<EpisodeStats> history;
    try {
        for (int ep = 0; ep < cfg_.train.n_episodes; ++ep) {
            auto data = run_episode(ep);
            data.stats.update = agent::ppo_update<float>(params_, adam_, data.transitions, data.advantages,
                                                         data.returns, cfg_.ppo, update_rng_);
            data.stats.log_std = params_.log_std();
            log::info("episode " + std::to_string(ep) + ": reward " + std::to_string(data.stats.total) + " Cd " +
                      std::to_string(data.stats.mean_cd));
            if (on_episode) on_episode(data, params_);
            history.push_back(data.stats);
        }
    } catch (...) {
        try {
            shutdown_workers();
        } catch (...) {
            launcher_.kill();
        }
        throw;
    }
    shutdown_workers();
    return history;
}

}  // namespace afc::orchestrator
