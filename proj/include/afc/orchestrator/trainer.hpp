#pragma once

#include <functional>
#include <vector>

#include "afc/agent/ppo.hpp"
#include "afc/broker/client.hpp"
#include "afc/orchestrator/baseline.hpp"
#include "afc/orchestrator/config.hpp"
#include "afc/orchestrator/launcher.hpp"

namespace afc::orchestrator {

/// Raised when a worker reports a failure, dies, or misses its deadline.
class WorkerFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows of [t, Cd(pe)..., Cl(pe)..., Q(pe)...] for one simulation.
struct Trace {
    int n_pe = 1;
    std::vector<double> data;

    std::size_t columns() const { return static_cast<std::size_t>(1 + 3 * n_pe); }
    std::size_t rows() const { return data.size() / columns(); }
    double t(std::size_t r) const { return data[r * columns()]; }
    double cd(std::size_t r, int pe) const { return data[r * columns() + 1 + pe]; }
    double cl(std::size_t r, int pe) const { return data[r * columns() + 1 + n_pe + pe]; }
    double q(std::size_t r, int pe) const { return data[r * columns() + 1 + 2 * n_pe + pe]; }
    std::vector<double> column(std::size_t c) const;
};

struct EpisodeStats {
    int episode = 0;
    int attempts = 1;
    /// Means over every step and trajectory of the local reward and its parts.
    double total = 0.0;
    double drag = 0.0;
    double lift = 0.0;
    double aggregated = 0.0;  ///< mean of the weighted rewards actually trained on
    /// Simulation 0, pe 0, over the whole episode.
    double mean_cd = 0.0;
    double mean_cl = 0.0;
    double sigma_cl = 0.0;
    agent::UpdateStats update;
    double log_std = 0.0;
};

struct EpisodeData {
    std::vector<agent::Transition> transitions;  ///< trajectory-major: env, pe, step
    std::vector<int> env_of, pe_of;
    std::vector<double> advantages, returns;
    EpisodeStats stats;
    Trace trace;  ///< simulation 0
};

/// Episode length and actuation interval from the config and the measured
/// shedding frequency.
double episode_duration(const TrainConfig& cfg, double baseline_st);

/// Drives workers through the broker and updates the policy with PPO.
class Trainer {
public:
    Trainer(RunConfig config, BaselineStats baseline, int n_snapshots, broker::Client& client,
            WorkerLauncher& launcher);

    /// One episode, retried once on worker failure. The trainer's own
    /// sampling stream advances either way.
    EpisodeData run_episode(int episode);

    using EpisodeCallback = std::function<void(const EpisodeData&, const agent::PolicyParams<float>&)>;
    /// Starts the workers, runs all episodes with an update after each, and
    /// shuts the workers down.
    std::vector<EpisodeStats> train(const EpisodeCallback& on_episode = {});

    agent::PolicyParams<float>& params() { return params_; }
    double cd_baseline() const { return cd_b_; }
    double t_action() const { return t_action_; }
    void shutdown_workers();

private:
    EpisodeData attempt(int episode, int attempt);
    std::vector<double> wait(const std::string& key, int env, std::size_t expected);

    RunConfig cfg_;
    BaselineStats baseline_;
    int n_snapshots_;
    broker::Client& client_;
    WorkerLauncher& launcher_;
    agent::PolicyParams<float> params_;
    agent::Adam<float> adam_;
    agent::Rng policy_rng_;
    agent::Rng update_rng_;
    std::vector<long> next_command_;
    double cd_b_ = 0.0;
    double t_action_ = 0.0;
    bool workers_running_ = false;
};

}  // namespace afc::orchestrator
