#pragma once

#include <cstdint>
#include <string>

#include "afc/agent/ppo.hpp"
#include "afc/flow/config.hpp"
#include "afc/orchestrator/baseline.hpp"

namespace afc::orchestrator {

struct TrainConfig {
    int n_episodes = 30;
    int actions_per_episode = 120;
    int n_cfd = 2;
    double shedding_periods = 6.0;  ///< episode length in baseline shedding periods
    double t_episode = 0.0;         ///< explicit episode length; 0 derives it from the baseline St
    double alpha = 0.3;
    double beta = 0.8;
    double cd_baseline = 0.0;  ///< 0 uses the measured baseline mean
    std::uint64_t seed = 1;
    std::uint32_t action_timeout_ms = 60000;
    std::uint32_t worker_timeout_ms = 600000;

    void validate() const;
};

struct EvalConfig {
    double onset = 0.0;           ///< uncontrolled time before actuation starts
    double max_duration = 200.0;  ///< controlled time budget
    double window_periods = 2.0;  ///< steadiness window length
    double drift_tolerance = 0.005;
    double stats_periods = 10.0;  ///< statistics window once steady
    int snapshot = 0;             ///< baseline snapshot to start from
};

struct BrokerConfig {
    std::string address = "127.0.0.1:6380";
    std::uint64_t capacity_mb = 256;
    std::uint32_t get_timeout_ms = 60000;
};

struct IoConfig {
    std::string out = "run";
    std::string baseline_dir;  ///< reuse an existing baseline; empty runs one under out/baseline
};

/// Everything a run needs. The text form is an INI-like key = value file
/// with sections [sim], [jets], [train], [ppo], [broker], [io]; unset keys
/// keep the desk-scale defaults.
struct RunConfig {
    flow::SimConfig sim{.n_pe = 4};
    flow::JetConfig jets;
    TrainConfig train;
    agent::PpoConfig ppo;
    BaselineConfig baseline;
    EvalConfig eval;
    BrokerConfig broker;
    IoConfig io;

    void validate() const;
};

/// Throws ConfigError("line N: ...") naming the offending line and key.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
/// Canonical text form; parse_run_config(to_text(c)) reproduces c exactly.
std::string to_text(const RunConfig& c);

}  // namespace afc::orchestrator
