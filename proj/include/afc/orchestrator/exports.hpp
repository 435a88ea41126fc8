#pragma once

#include <string>
#include <vector>

#include "afc/orchestrator/baseline.hpp"
#include "afc/orchestrator/evaluate.hpp"
#include "afc/orchestrator/trainer.hpp"

namespace afc::orchestrator {

/// Comma-separated, one header row, 9 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// cl_cd.csv (t, Cd_pe*, Cl_pe*) and action.csv (t, Q_pe*).
void write_trace(const std::string& dir, const Trace& trace);
void write_cp(const std::string& path, const flow::CpProfile& cp);
void write_spectrum(const std::string& path, const Spectrum& s);

/// Columns mean_Cl, sigma_Cl, St, mean_Cd, Cd_press, Cd_visc.
void write_baseline_stats(const std::string& path, const BaselineStats& s);
/// Reads what write_baseline_stats wrote (values rounded to 9 digits).
BaselineStats read_baseline_stats(const std::string& path);

/// Columns episode, total, drag_term, lift_term, aggregated.
void write_rewards(const std::string& path, const std::vector<EpisodeStats>& history);
void write_train_log(const std::string& path, const std::vector<EpisodeStats>& history);

void write_eval_stats(const std::string& path, const EvalResult& r, const BaselineStats& baseline);

/// Baseline trace in the per-pe trace layout (2D replicates pe 0).
Trace baseline_trace(const ForceTrace& f, int n_pe);

/// Writes the baseline directory: stats, traces, Cp, spectrum and snapshots.
void save_baseline(const std::string& dir, const BaselineResult& r, int n_pe);
int count_snapshots(const std::string& dir);

/// Collects plot-ready CSVs of a run directory into run_dir/export,
/// preferring evaluation output over training output over the baseline.
/// Returns the files written; throws ConfigError if one is unavailable.
std::vector<std::string> export_run(const std::string& run_dir);

}  // namespace afc::orchestrator
