#include "afc/flow/jets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "afc/errors.hpp"

namespace afc::flow {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

/// Signed angular distance a - b wrapped into (-pi, pi].
double angle_diff(double a, double b) {
    double d = std::remainder(a - b, 2.0 * std::numbers::pi);
    return d;
}

}  // namespace

JetSide jet_side(double theta, const JetConfig& jets) {
    const double half = 0.5 * jets.omega_deg * deg;
    // Tolerance absorbs the rounding of marker angles placed exactly on an arc edge.
    constexpr double eps = 1e-12;
    if (std::abs(angle_diff(theta, jets.theta_top_deg * deg)) <= half + eps) return JetSide::Top;
    if (std::abs(angle_diff(theta, jets.theta_bot_deg * deg)) <= half + eps) return JetSide::Bottom;
    return JetSide::None;
}

Velocity2 jet_velocity(double q, double theta, const JetConfig& jets) {
    const JetSide side = jet_side(theta, jets);
    if (side == JetSide::None) return {};
    const double omega = jets.omega_deg * deg;
    const double theta0 = (side == JetSide::Top ? jets.theta_top_deg : jets.theta_bot_deg) * deg;
    const double flow = side == JetSide::Top ? q : -q;
    const double d = angle_diff(theta, theta0);
    const double speed = flow * std::numbers::pi /
                         (SimConfig::rho * SimConfig::diameter * omega) *
                         std::cos(std::numbers::pi / omega * d);
    return {speed * std::cos(theta), speed * std::sin(theta)};
}

JetAction::JetAction(std::vector<double> q_start, std::vector<double> q_end, double t_start,
                     double duration, const JetConfig& jets)
    : q_start_(std::move(q_start)), q_end_(std::move(q_end)), t_start_(t_start),
      duration_(duration) {
    if (q_start_.size() != q_end_.size()) throw ConfigError("JetAction: start/end size mismatch");
    for (auto* v : {&q_start_, &q_end_}) {
        for (double& q : *v) q = std::clamp(q, jets.q_min(), jets.q_max);
    }
}

JetAction JetAction::hold(std::vector<double> q, const JetConfig& jets) {
    auto copy = q;
    return JetAction(std::move(copy), std::move(q), 0.0, 0.0, jets);
}

std::vector<double> JetAction::at(double t) const {
    if (duration_ <= 0.0) return q_end_;
    const double s = std::clamp((t - t_start_) / duration_, 0.0, 1.0);
    std::vector<double> out(q_end_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = q_start_[i] + s * (q_end_[i] - q_start_[i]);
    }
    return out;
}

}  // namespace afc::flow
