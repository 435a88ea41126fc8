#include "afc/cli/app.hpp"

#include <signal.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "afc/agent/model_io.hpp"
#include "afc/broker/client.hpp"
#include "afc/broker/server.hpp"
#include "afc/errors.hpp"
#include "afc/flow/checkpoint.hpp"
#include "afc/log.hpp"
#include "afc/orchestrator/config.hpp"
#include "afc/orchestrator/evaluate.hpp"
#include "afc/orchestrator/exports.hpp"
#include "afc/orchestrator/trainer.hpp"
#include "afc/orchestrator/worker.hpp"
#include "afc/util/bytes.hpp"

namespace fs = std::filesystem;
using namespace afc::orchestrator;

namespace afc::cli {

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string broker_addr;
    std::optional<std::uint64_t> capacity_mb;
    bool embedded = false;
    std::string model;
    std::string out;
    bool dry_run = false;
    int env = 0;
    std::string snapshots;
};

RunConfig resolve(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
    if (o.seed) c.train.seed = *o.seed;
    if (!o.broker_addr.empty()) c.broker.address = o.broker_addr;
    if (o.capacity_mb) c.broker.capacity_mb = *o.capacity_mb;
    if (!o.out.empty()) c.io.out = o.out;
    c.validate();
    return c;
}

std::string baseline_dir(const RunConfig& c) {
    return c.io.baseline_dir.empty() ? c.io.out + "/baseline" : c.io.baseline_dir;
}

void write_text(const std::string& path, const std::string& s) {
    util::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

BaselineStats ensure_baseline(const RunConfig& c, bool allow_run) {
    const std::string dir = baseline_dir(c);
    const std::string stats = dir + "/baseline_stats.csv";
    if (!fs::exists(stats)) {
        if (!allow_run) throw ConfigError("no baseline at " + dir + "; run `afc baseline` first");
        log::info("no baseline at " + dir + "; running it now");
        save_baseline(dir, run_baseline(c.sim, c.jets, c.baseline), c.sim.n_pe);
    }
    return read_baseline_stats(stats);
}

int cmd_baseline(const RunConfig& c) {
    const std::string dir = baseline_dir(c);
    const auto r = run_baseline(c.sim, c.jets, c.baseline);
    save_baseline(dir, r, c.sim.n_pe);
    const auto& s = r.stats;
    std::cout << "baseline: mean Cd " << s.mean_cd << " (press " << s.cd_press << ", visc " << s.cd_visc
              << "), mean Cl " << s.mean_cl << ", sigma Cl " << s.sigma_cl << ", St " << s.st << " -> " << dir << "\n";
    return exit_ok;
}

std::vector<std::string> worker_command(const RunConfig& c, const std::string& config_file, const std::string& addr) {
    return {fs::read_symlink("/proc/self/exe").string(), "worker", "--config", config_file, "--broker-addr", addr,
            "--snapshots", baseline_dir(c) + "/snapshots"};
}

int cmd_train(RunConfig c, const Options& o) {
    fs::create_directories(c.io.out + "/models");
    const BaselineStats baseline = ensure_baseline(c, true);
    const int n_snapshots = count_snapshots(baseline_dir(c));

    std::unique_ptr<broker::Server> server;
    if (o.embedded) {
        server = std::make_unique<broker::Server>(o.broker_addr.empty() ? "127.0.0.1:0" : c.broker.address,
                                                  c.broker.capacity_mb << 20);
        c.broker.address = "127.0.0.1:" + std::to_string(server->port());
    }
    const std::string config_file = c.io.out + "/config.ini";
    write_text(config_file, to_text(c));

    broker::Client client(c.broker.address, 2000);
    client.ping();
    ProcessLauncher launcher(worker_command(c, config_file, c.broker.address));
    Trainer trainer(c, baseline, n_snapshots, client, launcher);

    std::vector<EpisodeStats> history;
    EpisodeData last;
    const auto history_final = trainer.train([&](const EpisodeData& d, const agent::PolicyParams<float>& p) {
        history.push_back(d.stats);
        char name[64];
        std::snprintf(name, sizeof name, "/models/model_ep%03d.afcp", d.stats.episode);
        agent::save_model_file(c.io.out + name, p);
        agent::save_model_file(c.io.out + "/model.afcp", p);
        write_rewards(c.io.out + "/reward.csv", history);
        write_train_log(c.io.out + "/train_log.csv", history);
        last = d;
    });
    write_trace(c.io.out, last.trace);
    const auto& s = history_final.back();
    std::cout << "train: " << history_final.size() << " episodes, final episode Cd reduction: "
              << pct(100.0 * (trainer.cd_baseline() - s.mean_cd) / trainer.cd_baseline())
              << "%, sigma_Cl reduction: " << pct(100.0 * (baseline.sigma_cl - s.sigma_cl) / baseline.sigma_cl)
              << "% -> " << c.io.out << "\n";
    return exit_ok;
}

int cmd_evaluate(const RunConfig& c, const Options& o) {
    if (o.model.empty()) throw ConfigError("evaluate requires --model PATH");
    if (!fs::exists(o.model)) throw ConfigError("model file " + o.model + " does not exist");
    const auto params = agent::load_model_file(o.model);
    const BaselineStats baseline = ensure_baseline(c, false);
    const auto snapshot = util::read_file(snapshot_path(baseline_dir(c) + "/snapshots", c.eval.snapshot));
    const auto r = evaluate_deterministic(params, c, baseline, snapshot);
    const std::string dir = c.io.out + "/eval";
    fs::create_directories(dir);
    write_trace(dir, r.trace);
    write_cp(dir + "/cp.csv", r.cp);
    write_spectrum(dir + "/spectrum.csv", r.q_spectrum);
    write_eval_stats(dir + "/eval_stats.csv", r, baseline);
    std::cout << "Cd reduction: " << pct(r.cd_reduction(baseline.mean_cd))
              << "%, sigma_Cl reduction: " << pct(r.sigma_cl_reduction(baseline.sigma_cl)) << "%"
              << (r.converged ? "" : " (unconverged)") << " -> " << dir << "\n";
    return exit_ok;
}

int cmd_broker(const RunConfig& c) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    broker::Server server(c.broker.address, c.broker.capacity_mb << 20);
    std::cout << "broker: serving on " << server.address() << " with " << c.broker.capacity_mb << " MB" << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    server.wait();
    waiter.join();
    std::cout << "broker: stopped\n";
    return exit_ok;
}

int cmd_export(const RunConfig& c) {
    const auto files = export_run(c.io.out);
    std::cout << "export: wrote " << files.size() << " files to " << c.io.out << "/export\n";
    return exit_ok;
}

int cmd_worker(const RunConfig& c, const Options& o) {
    run_worker({c.broker.address, o.env, o.snapshots, c});
    return exit_ok;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Drag reduction of a cylinder wake with jet actuation trained by PPO"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Run configuration file");
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--broker-addr", o.broker_addr, "Broker HOST:PORT");
        sub->add_option("--broker-capacity-mb", o.capacity_mb, "Broker memory budget in MB");
        sub->add_flag("--embedded-broker", o.embedded, "Host the broker inside this process");
        sub->add_option("--model", o.model, "Policy model file");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_flag("--dry-run", o.dry_run, "Print the resolved configuration and exit");
    };
    auto* baseline = app.add_subcommand("baseline", "Uncontrolled flow statistics and restart snapshots");
    auto* train = app.add_subcommand("train", "Train the policy");
    auto* evaluate = app.add_subcommand("evaluate", "Deterministic evaluation of a trained policy");
    auto* brk = app.add_subcommand("broker", "Run a standalone tensor broker");
    auto* exp = app.add_subcommand("export", "Collect plot-ready CSV files of a run");
    auto* worker = app.add_subcommand("worker", "");
    worker->group("");
    for (auto* s : {baseline, train, evaluate, brk, exp, worker}) common(s);
    worker->add_option("--env", o.env, "Simulation index")->required();
    worker->add_option("--snapshots", o.snapshots, "Snapshot directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        RunConfig c = resolve(o);
        if (o.dry_run) {
            std::cout << to_text(c);
            return exit_ok;
        }
        if (*baseline) return cmd_baseline(c);
        if (*train) return cmd_train(c, o);
        if (*evaluate) return cmd_evaluate(c, o);
        if (*brk) return cmd_broker(c);
        if (*exp) return cmd_export(c);
        if (*worker) return cmd_worker(c, o);
    } catch (const ConfigError& e) {
        std::cerr << "afc: configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const FormatError& e) {
        std::cerr << "afc: invalid file: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        std::cerr << "afc: numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const WorkerFailure& e) {
        std::cerr << "afc: worker failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const TransportError& e) {
        std::cerr << "afc: connectivity error: " << e.what() << "\n";
        return exit_connectivity;
    } catch (const broker::BrokerError& e) {
        std::cerr << "afc: broker refused request: " << e.what() << "\n";
        return exit_connectivity;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "afc: file system error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_ok;
}

}  // namespace afc::cli
