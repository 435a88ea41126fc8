#include "afc/orchestrator/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "afc/errors.hpp"
#include "afc/util/bytes.hpp"

namespace afc::orchestrator {

void TrainConfig::validate() const {
    if (n_episodes < 1) throw ConfigError("train.n_episodes must be positive");
    if (actions_per_episode < 1) throw ConfigError("train.actions_per_episode must be positive");
    if (n_cfd < 1) throw ConfigError("train.n_cfd must be positive");
    if (!(shedding_periods > 0.0)) throw ConfigError("train.shedding_periods must be positive");
    if (t_episode < 0.0) throw ConfigError("train.t_episode must not be negative");
    if (!(alpha >= 0.0)) throw ConfigError("train.alpha must not be negative");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("train.beta must lie in [0, 1]");
}

void RunConfig::validate() const {
    sim.validate();
    jets.validate();
    train.validate();
    ppo.validate();
    if (ppo.q_max != jets.q_max) throw ConfigError("ppo.q_max must equal jets.q_max");
    if (broker.capacity_mb == 0) throw ConfigError("broker.capacity_mb must be positive");
    if (baseline.snapshots < 1) throw ConfigError("train.snapshots must be positive");
    if (eval.snapshot < 0 || eval.snapshot >= baseline.snapshots) {
        throw ConfigError("train.eval_snapshot must index a baseline snapshot");
    }
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T parse_number(const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("not a boolean");
}

struct Field {
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

template <typename T>
Field number(T& ref) {
    return {[&ref](const std::string& s) { ref = parse_number<T>(s); },
            [&ref] {
                if constexpr (std::is_floating_point_v<T>) {
                    return fmt(ref);
                } else {
                    return std::to_string(ref);
                }
            }};
}

Field boolean(bool& ref) {
    return {[&ref](const std::string& s) { ref = parse_bool(s); }, [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field text(std::string& ref) {
    return {[&ref](const std::string& s) { ref = s; }, [&ref] { return ref; }};
}

Field preconditioner(bool& spectral) {
    return {[&spectral](const std::string& s) {
                if (s == "spectral") {
                    spectral = true;
                } else if (s == "jacobi") {
                    spectral = false;
                } else {
                    throw std::invalid_argument("expected spectral or jacobi");
                }
            },
            [&spectral] { return std::string(spectral ? "spectral" : "jacobi"); }};
}

/// Ordered registry of "section.key" -> accessor bound to `c`.
std::vector<std::pair<std::string, Field>> fields(RunConfig& c) {
    return {
        {"sim.reynolds", number(c.sim.reynolds)},
        {"sim.lx", number(c.sim.lx)},
        {"sim.ly", number(c.sim.ly)},
        {"sim.center_x", number(c.sim.center[0])},
        {"sim.center_y", number(c.sim.center[1])},
        {"sim.h", number(c.sim.h)},
        {"sim.cfl", number(c.sim.cfl)},
        {"sim.n_pe", number(c.sim.n_pe)},
        {"sim.three_d", boolean(c.sim.three_d)},
        {"sim.forcing_iterations", number(c.sim.forcing_iterations)},
        {"sim.poisson_max_iterations", number(c.sim.poisson_max_iterations)},
        {"sim.poisson_tolerance", number(c.sim.poisson_tolerance)},
        {"sim.preconditioner", preconditioner(c.sim.spectral_preconditioner)},
        {"jets.theta_top_deg", number(c.jets.theta_top_deg)},
        {"jets.theta_bot_deg", number(c.jets.theta_bot_deg)},
        {"jets.omega_deg", number(c.jets.omega_deg)},
        {"jets.l_jet", number(c.jets.l_jet)},
        {"jets.q_max", number(c.jets.q_max)},
        {"jets.enabled", boolean(c.jets.enabled)},
        {"train.n_episodes", number(c.train.n_episodes)},
        {"train.actions_per_episode", number(c.train.actions_per_episode)},
        {"train.n_cfd", number(c.train.n_cfd)},
        {"train.shedding_periods", number(c.train.shedding_periods)},
        {"train.t_episode", number(c.train.t_episode)},
        {"train.alpha", number(c.train.alpha)},
        {"train.beta", number(c.train.beta)},
        {"train.cd_baseline", number(c.train.cd_baseline)},
        {"train.seed", number(c.train.seed)},
        {"train.action_timeout_ms", number(c.train.action_timeout_ms)},
        {"train.worker_timeout_ms", number(c.train.worker_timeout_ms)},
        {"train.baseline_transient", number(c.baseline.t_transient)},
        {"train.baseline_record", number(c.baseline.t_record)},
        {"train.snapshots", number(c.baseline.snapshots)},
        {"train.perturbation", number(c.baseline.perturbation)},
        {"train.sample_dt", number(c.baseline.sample_dt)},
        {"train.eval_onset", number(c.eval.onset)},
        {"train.eval_max_duration", number(c.eval.max_duration)},
        {"train.eval_window_periods", number(c.eval.window_periods)},
        {"train.eval_drift_tolerance", number(c.eval.drift_tolerance)},
        {"train.eval_stats_periods", number(c.eval.stats_periods)},
        {"train.eval_snapshot", number(c.eval.snapshot)},
        {"ppo.clip", number(c.ppo.clip)},
        {"ppo.gamma", number(c.ppo.gamma)},
        {"ppo.lambda", number(c.ppo.lambda)},
        {"ppo.learning_rate", number(c.ppo.learning_rate)},
        {"ppo.epochs", number(c.ppo.epochs)},
        {"ppo.minibatch", number(c.ppo.minibatch)},
        {"ppo.entropy_coef", number(c.ppo.entropy_coef)},
        {"ppo.value_coef", number(c.ppo.value_coef)},
        {"ppo.max_grad_norm", number(c.ppo.max_grad_norm)},
        {"ppo.hidden", number(c.ppo.hidden)},
        {"ppo.init_log_std", number(c.ppo.init_log_std)},
        {"broker.address", text(c.broker.address)},
        {"broker.capacity_mb", number(c.broker.capacity_mb)},
        {"broker.get_timeout_ms", number(c.broker.get_timeout_ms)},
        {"io.out", text(c.io.out)},
        {"io.baseline_dir", text(c.io.baseline_dir)},
    };
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_run_config(const std::string& input) {
    RunConfig c;
    std::map<std::string, Field> table;
    for (auto& [k, f] : fields(c)) table.emplace(k, std::move(f));
    static const char* sections[] = {"sim", "jets", "train", "ppo", "broker", "io"};

    std::istringstream in(input);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        std::string line = trim(raw.substr(0, raw.find_first_of("#;")));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(std::begin(sections), std::end(sections), section) == std::end(sections)) {
                throw ConfigError(where + "unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + "key '" + key + "' appears before any section");
        const std::string full = section + "." + key;
        auto it = table.find(full);
        if (it == table.end()) throw ConfigError(where + "unknown key '" + full + "'");
        try {
            it->second.set(value);
        } catch (const std::exception& e) {
            throw ConfigError(where + "invalid value '" + value + "' for key '" + full + "' (" + e.what() + ")");
        }
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    const auto bytes = util::read_file(path);
    return parse_run_config(std::string(bytes.begin(), bytes.end()));
}

std::string to_text(const RunConfig& c) {
    RunConfig copy = c;
    std::ostringstream out;
    std::string section;
    for (auto& [key, f] : fields(copy)) {
        const auto dot = key.find('.');
        const std::string s = key.substr(0, dot);
        if (s != section) {
            if (!section.empty()) out << '\n';
            out << '[' << s << "]\n";
            section = s;
        }
        out << key.substr(dot + 1) << " = " << f.get() << '\n';
    }
    return out.str();
}

}  // namespace afc::orchestrator
