#include "afc/orchestrator/launcher.hpp"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <memory>

#include "afc/errors.hpp"
#include "afc/log.hpp"

extern char** environ;

namespace afc::orchestrator {

void ThreadLauncher::start(int n_cfd) {
    stop();
    for (int e = 0; e < n_cfd; ++e) {
        running_.push_back(std::make_unique<std::atomic<bool>>(true));
        threads_.emplace_back([this, e, flag = running_.back().get()] {
            try {
                body_(e);
            } catch (const std::exception& ex) {
                log::error("worker thread " + std::to_string(e) + ": " + ex.what());
            }
            *flag = false;
        });
    }
}

bool ThreadLauncher::alive(int env) const {
    return env < static_cast<int>(running_.size()) && running_[static_cast<std::size_t>(env)]->load();
}

void ThreadLauncher::stop() {
    for (auto& t : threads_) {
        if (t.joinable()) t.join();
    }
    threads_.clear();
    running_.clear();
}

void ProcessLauncher::start(int n_cfd) {
    kill();
    for (int e = 0; e < n_cfd; ++e) {
        std::vector<std::string> args = argv_;
        args.push_back("--env");
        args.push_back(std::to_string(e));
        std::vector<char*> cargs;
        for (auto& a : args) cargs.push_back(a.data());
        cargs.push_back(nullptr);
        pid_t pid = 0;
        const int rc = posix_spawn(&pid, cargs[0], nullptr, nullptr, cargs.data(), environ);
        if (rc != 0) throw ConfigError("cannot start worker '" + args[0] + "': " + std::strerror(rc));
        pids_.push_back(pid);
    }
}

bool ProcessLauncher::alive(int env) const {
    if (env >= static_cast<int>(pids_.size())) return false;
    pid_t& pid = pids_[static_cast<std::size_t>(env)];
    if (pid <= 0) return false;
    int status = 0;
    if (waitpid(pid, &status, WNOHANG) == pid) {
        pid = -1;
        return false;
    }
    return true;
}

void ProcessLauncher::stop() {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    for (auto& pid : pids_) {
        while (pid > 0) {
            int status = 0;
            if (waitpid(pid, &status, WNOHANG) != 0) {
                pid = -1;
            } else if (std::chrono::steady_clock::now() > deadline) {
                ::kill(pid, SIGKILL);
                waitpid(pid, &status, 0);
                pid = -1;
            } else {
                std::this_thread::sleep_for(std::chrono::milliseconds(20));
            }
        }
    }
    pids_.clear();
}

void ProcessLauncher::kill() {
    for (auto pid : pids_) {
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            int status = 0;
            waitpid(pid, &status, 0);
        }
    }
    pids_.clear();
}

}  // namespace afc::orchestrator
