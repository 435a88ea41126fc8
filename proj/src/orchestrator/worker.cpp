#include "afc/orchestrator/worker.hpp"

#include <cmath>

#include "afc/broker/client.hpp"
#include "afc/errors.hpp"
#include "afc/log.hpp"
#include "afc/orchestrator/simulation.hpp"
#include "afc/util/bytes.hpp"

namespace afc::orchestrator {

namespace keys {

std::string episode_prefix(int episode) { return "ep" + std::to_string(episode) + "."; }

static std::string pe_key(int episode, int env, int pe, const char* what, int step) {
    return episode_prefix(episode) + "env" + std::to_string(env) + ".pe" + std::to_string(pe) + "." + what + "." +
           std::to_string(step);
}

std::string state(int episode, int env, int pe, int step) { return pe_key(episode, env, pe, "state", step); }
std::string action(int episode, int env, int pe, int step) { return pe_key(episode, env, pe, "action", step); }
std::string reward(int episode, int env, int pe, int step) { return pe_key(episode, env, pe, "reward", step); }

std::string trace(int episode, int env) { return episode_prefix(episode) + "env" + std::to_string(env) + ".trace"; }

std::string command(int env, long index) { return "ctl.env" + std::to_string(env) + ".cmd." + std::to_string(index); }

}  // namespace keys

std::string snapshot_path(const std::string& dir, int index) {
    return dir + "/snapshot_" + std::to_string(index) + ".afcs";
}

namespace {

const broker::Tensor failure_marker{broker::DType::F64, {0}, {}};

void run_episode(broker::Client& client, Simulation& sim, const WorkerOptions& opt, int episode, int snapshot,
                 int n_actions, double t_action) {
    const int env = opt.env;
    const int n_pe = sim.n_pe();
    int step = 0;
    try {
        sim.load_snapshot(util::read_file(snapshot_path(opt.snapshot_dir, snapshot)));
        const double t0 = sim.field().t;
        std::vector<double> trace;
        auto record = [&](const flow::FlowField& f, const flow::ForceRecord& r, std::span<const double> q) {
            trace.push_back(f.t - t0);
            for (int p = 0; p < n_pe; ++p) trace.push_back(r.pe[p].cd);
            for (int p = 0; p < n_pe; ++p) trace.push_back(r.pe[p].cl);
            for (int p = 0; p < n_pe; ++p) trace.push_back(q[p]);
        };
        std::vector<double> q(static_cast<std::size_t>(n_pe));
        for (; step < n_actions; ++step) {
            const auto obs = sim.observe();
            for (int p = 0; p < n_pe; ++p) client.put_f64(keys::state(episode, env, p, step), obs[p]);
            for (int p = 0; p < n_pe; ++p) {
                auto a = client.get_f64(keys::action(episode, env, p, step), opt.config.train.action_timeout_ms);
                if (!a || a->size() != 1) throw TransportError("no action received for step " + std::to_string(step));
                q[p] = (*a)[0];
            }
            const auto result = sim.advance(q, t_action, record);
            for (int p = 0; p < n_pe; ++p) {
                const double rc[] = {result.cd[p], result.cl[p]};
                client.put_f64(keys::reward(episode, env, p, step), rc);
            }
        }
        const auto obs = sim.observe();
        for (int p = 0; p < n_pe; ++p) client.put_f64(keys::state(episode, env, p, n_actions), obs[p]);
        const auto cols = static_cast<std::uint64_t>(1 + 3 * n_pe);
        client.put(keys::trace(episode, env), broker::Tensor::from_f64(trace, {trace.size() / cols, cols}));
    } catch (const TransportError&) {
        throw;
    } catch (const std::exception& e) {
        log::error("worker " + std::to_string(env) + " episode " + std::to_string(episode) + " failed: " + e.what());
        for (int p = 0; p < n_pe; ++p) {
            client.put(keys::state(episode, env, p, step), failure_marker);
            client.put(keys::reward(episode, env, p, step), failure_marker);
        }
    }
}

}  // namespace

void run_worker(const WorkerOptions& opt) {
    broker::Client client(opt.broker_address, 10000);
    Simulation sim(opt.config.sim, opt.config.jets);
    for (long k = 0;; ++k) {
        std::optional<std::vector<double>> cmd;
        while (!cmd) cmd = client.get_f64(keys::command(opt.env, k), 60000);
        client.del(keys::command(opt.env, k));
        if (cmd->empty() || static_cast<int>((*cmd)[0]) == static_cast<int>(WorkerOp::Shutdown)) return;
        if (cmd->size() != 5) throw FormatError("malformed worker command");
        const auto& c = *cmd;
        log::debug("worker " + std::to_string(opt.env) + " starts episode " + std::to_string(static_cast<int>(c[1])));
        run_episode(client, sim, opt, static_cast<int>(c[1]), static_cast<int>(c[2]), static_cast<int>(c[3]), c[4]);
    }
}

}  // namespace afc::orchestrator
