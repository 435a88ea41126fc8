#pragma once

#include <span>
#include <vector>

namespace afc::orchestrator {

/// total = drag + lift, with drag = Cd_b - Cd and lift = -alpha |Cl|.
struct RewardTerms {
    double drag = 0.0;
    double lift = 0.0;
    double total = 0.0;
};

RewardTerms local_reward(double cd_baseline, double cd_mean, double cl_mean, double alpha);

/// R_i = beta r_i + (1 - beta) mean(r).
std::vector<double> aggregate_reward(std::span<const double> r, double beta);

}  // namespace afc::orchestrator
