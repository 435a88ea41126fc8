#pragma once

#include <cstdint>
#include <string>

#include "afc/orchestrator/config.hpp"

namespace afc::orchestrator {

/// Broker key names shared by trainer and workers.
namespace keys {
std::string episode_prefix(int episode);
std::string state(int episode, int env, int pe, int step);
std::string action(int episode, int env, int pe, int step);
std::string reward(int episode, int env, int pe, int step);
std::string trace(int episode, int env);
std::string command(int env, long index);
}  // namespace keys

/// Worker commands travel as f64 tensors: [opcode, episode, snapshot,
/// actions, t_action].
enum class WorkerOp : int { RunEpisode = 1, Shutdown = 2 };

struct WorkerOptions {
    std::string broker_address;
    int env = 0;
    std::string snapshot_dir;  ///< holds snapshot_<k>.afcs
    RunConfig config;
};

/// Serves episodes for simulation `env` until a Shutdown command arrives.
/// Per step it publishes the observation, waits for the action, advances one
/// actuation interval and publishes the interval-averaged [Cd, Cl]. After the
/// final step it publishes the closing observation and the episode trace
/// [t, Cd(pe)..., Cl(pe)..., Q(pe)...]. Any failure inside an episode is
/// signalled to the trainer with empty tensors on the pending keys.
void run_worker(const WorkerOptions& options);

std::string snapshot_path(const std::string& dir, int index);

}  // namespace afc::orchestrator
