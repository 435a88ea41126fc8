#include "afc/orchestrator/exports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "afc/errors.hpp"
#include "afc/orchestrator/worker.hpp"
#include "afc/util/bytes.hpp"

namespace fs = std::filesystem;

namespace afc::orchestrator {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> pe_columns(const char* name, int n_pe) {
    std::vector<std::string> out;
    for (int p = 0; p < n_pe; ++p) out.push_back(std::string(name) + "_pe" + std::to_string(p));
    return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
        out << '\n';
    }
    const std::string s = out.str();
    util::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void write_trace(const std::string& dir, const Trace& trace) {
    std::vector<std::string> h{"t"};
    for (auto& c : pe_columns("Cd", trace.n_pe)) h.push_back(c);
    for (auto& c : pe_columns("Cl", trace.n_pe)) h.push_back(c);
    std::vector<std::string> ha{"t"};
    for (auto& c : pe_columns("Q", trace.n_pe)) ha.push_back(c);
    std::vector<std::vector<double>> rows, actions;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        std::vector<double> row{trace.t(r)}, a{trace.t(r)};
        for (int p = 0; p < trace.n_pe; ++p) row.push_back(trace.cd(r, p));
        for (int p = 0; p < trace.n_pe; ++p) row.push_back(trace.cl(r, p));
        for (int p = 0; p < trace.n_pe; ++p) a.push_back(trace.q(r, p));
        rows.push_back(std::move(row));
        actions.push_back(std::move(a));
    }
    write_csv(dir + "/cl_cd.csv", h, rows);
    write_csv(dir + "/action.csv", ha, actions);
}

void write_cp(const std::string& path, const flow::CpProfile& cp) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < cp.cp.size(); ++i) rows.push_back({cp.theta_deg[i], cp.cp[i]});
    write_csv(path, {"theta_deg", "Cp"}, rows);
}

void write_spectrum(const std::string& path, const Spectrum& s) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.st.size(); ++i) rows.push_back({s.st[i], s.power[i]});
    write_csv(path, {"St", "power"}, rows);
}

void write_baseline_stats(const std::string& path, const BaselineStats& s) {
    write_csv(path, {"mean_Cl", "sigma_Cl", "St", "mean_Cd", "Cd_press", "Cd_visc", "St_first_half", "St_second_half"},
              {{s.mean_cl, s.sigma_cl, s.st, s.mean_cd, s.cd_press, s.cd_visc, s.st_first_half, s.st_second_half}});
}

BaselineStats read_baseline_stats(const std::string& path) {
    const auto bytes = util::read_file(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row)) throw ConfigError("baseline stats file " + path + " is incomplete");
    std::vector<double> v;
    std::istringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
        try {
            v.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("baseline stats file " + path + " has a malformed value");
        }
    }
    if (v.size() != 8) throw ConfigError("baseline stats file " + path + " has the wrong number of columns");
    return BaselineStats{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

void write_rewards(const std::string& path, const std::vector<EpisodeStats>& history) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : history) rows.push_back({static_cast<double>(s.episode), s.total, s.drag, s.lift, s.aggregated});
    write_csv(path, {"episode", "total", "drag_term", "lift_term", "aggregated"}, rows);
}

void write_train_log(const std::string& path, const std::vector<EpisodeStats>& history) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : history) {
        rows.push_back({static_cast<double>(s.episode), static_cast<double>(s.attempts), s.mean_cd, s.mean_cl,
                        s.sigma_cl, s.update.policy_loss, s.update.value_loss, s.update.entropy, s.update.approx_kl,
                        s.update.clip_fraction, s.log_std});
    }
    write_csv(path,
              {"episode", "attempts", "mean_Cd", "mean_Cl", "sigma_Cl", "policy_loss", "value_loss", "entropy",
               "approx_kl", "clip_fraction", "log_std"},
              rows);
}

void write_eval_stats(const std::string& path, const EvalResult& r, const BaselineStats& b) {
    write_csv(path,
              {"mean_Cl", "sigma_Cl", "St", "mean_Cd", "Cd_press", "Cd_visc", "Cd_reduction_pct",
               "sigma_Cl_reduction_pct", "St_Q", "converged", "t_steady"},
              {{r.cl.mean, r.cl.sigma, r.cl.st, r.mean_cd, r.cd_press, r.cd_visc, r.cd_reduction(b.mean_cd),
                r.sigma_cl_reduction(b.sigma_cl), r.q.st, r.converged ? 1.0 : 0.0, r.t_steady}});
}

Trace baseline_trace(const ForceTrace& f, int n_pe) {
    Trace t;
    t.n_pe = n_pe;
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        t.data.push_back(f.t[i]);
        for (int p = 0; p < n_pe; ++p) t.data.push_back(f.cd[i]);
        for (int p = 0; p < n_pe; ++p) t.data.push_back(f.cl[i]);
        for (int p = 0; p < n_pe; ++p) t.data.push_back(0.0);
    }
    return t;
}

void save_baseline(const std::string& dir, const BaselineResult& r, int n_pe) {
    fs::create_directories(dir + "/snapshots");
    write_baseline_stats(dir + "/baseline_stats.csv", r.stats);
    write_trace(dir, baseline_trace(r.trace, n_pe));
    write_cp(dir + "/cp.csv", r.cp);
    write_spectrum(dir + "/spectrum.csv", r.spectrum);
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        util::write_file(snapshot_path(dir + "/snapshots", static_cast<int>(k)), r.snapshots[k]);
    }
}

int count_snapshots(const std::string& dir) {
    int n = 0;
    while (fs::exists(snapshot_path(dir + "/snapshots", n))) ++n;
    return n;
}

std::vector<std::string> export_run(const std::string& run_dir) {
    const fs::path root(run_dir);
    if (!fs::is_directory(root)) throw ConfigError("run directory " + run_dir + " does not exist");
    const fs::path out = root / "export";
    fs::create_directories(out);
    const std::vector<fs::path> sources{root / "eval", root, root / "baseline"};
    std::vector<std::string> written;
    for (const char* name : {"cl_cd.csv", "reward.csv", "action.csv", "cp.csv", "spectrum.csv"}) {
        bool found = false;
        for (const auto& dir : sources) {
            const fs::path f = dir / name;
            if (fs::exists(f) && fs::file_size(f) > 0) {
                fs::copy_file(f, out / name, fs::copy_options::overwrite_existing);
                written.push_back((out / name).string());
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError(std::string("run directory ") + run_dir + " has no " + name);
    }
    return written;
}

}  // namespace afc::orchestrator
