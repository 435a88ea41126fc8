#include "afc/orchestrator/rewards.hpp"

#include <cmath>
#include <numeric>

#include "afc/errors.hpp"

namespace afc::orchestrator {

RewardTerms local_reward(double cd_baseline, double cd_mean, double cl_mean, double alpha) {
    RewardTerms t;
    t.drag = cd_baseline - cd_mean;
    t.lift = -alpha * std::abs(cl_mean);
    t.total = t.drag + t.lift;
    return t;
}

std::vector<double> aggregate_reward(std::span<const double> r, double beta) {
    if (r.empty()) throw ConfigError("aggregate_reward needs at least one jet");
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = beta * r[i] + (1.0 - beta) * mean;
    return out;
}

}  // namespace afc::orchestrator
