#pragma once

#include <span>
#include <vector>

#include "afc/flow/config.hpp"
#include "afc/flow/geometry.hpp"

namespace afc::flow {

struct Velocity2 {
    double u = 0.0;
    double v = 0.0;
};

/// Wall-normal jet velocity at surface angle `theta` (radians) for mass flow
/// rate `q` of the top jet. The bottom jet carries -q. Zero outside both arcs.
Velocity2 jet_velocity(double q, double theta, const JetConfig& jets);

/// Which jet arc contains `theta`, if any. Arc edges are inclusive.
JetSide jet_side(double theta, const JetConfig& jets);

/// Per-pseudo-environment flow rates, linearly ramped from `q_start` to
/// `q_end` over [t_start, t_start + duration]. Values are clamped to the
/// jet bounds on the way in.
class JetAction {
public:
    JetAction() = default;
    JetAction(std::vector<double> q_start, std::vector<double> q_end, double t_start,
              double duration, const JetConfig& jets);
    /// Constant actuation.
    static JetAction hold(std::vector<double> q, const JetConfig& jets);

    std::vector<double> at(double t) const;
    const std::vector<double>& start() const { return q_start_; }
    const std::vector<double>& end() const { return q_end_; }
    std::size_t size() const { return q_end_.size(); }

private:
    std::vector<double> q_start_;
    std::vector<double> q_end_;
    double t_start_ = 0.0;
    double duration_ = 0.0;
};

}  // namespace afc::flow
