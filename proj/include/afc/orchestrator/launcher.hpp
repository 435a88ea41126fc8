#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <sys/types.h>

namespace afc::orchestrator {

/// Starts and reaps the n_cfd solver workers.
class WorkerLauncher {
public:
    virtual ~WorkerLauncher() = default;
    virtual void start(int n_cfd) = 0;
    virtual bool alive(int env) const = 0;
    /// Waits for workers that were told to shut down; kills stragglers
    /// where possible.
    virtual void stop() = 0;
    /// Ends all workers immediately where possible.
    virtual void kill() = 0;
};

/// Workers as in-process threads running `body(env)`. Used by tests; kill()
/// falls back to joining.
class ThreadLauncher : public WorkerLauncher {
public:
    explicit ThreadLauncher(std::function<void(int)> body) : body_(std::move(body)) {}
    ~ThreadLauncher() override { stop(); }
    void start(int n_cfd) override;
    bool alive(int env) const override;
    void stop() override;
    void kill() override { stop(); }

private:
    std::function<void(int)> body_;
    std::vector<std::thread> threads_;
    std::vector<std::unique_ptr<std::atomic<bool>>> running_;
};

/// Workers as child processes: argv_prefix followed by "--env N".
class ProcessLauncher : public WorkerLauncher {
public:
    explicit ProcessLauncher(std::vector<std::string> argv_prefix) : argv_(std::move(argv_prefix)) {}
    ~ProcessLauncher() override { kill(); }
    void start(int n_cfd) override;
    bool alive(int env) const override;
    void stop() override;
    void kill() override;

private:
    std::vector<std::string> argv_;
    mutable std::vector<pid_t> pids_;
};

}  // namespace afc::orchestrator
