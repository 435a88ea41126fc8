#pragma once

#include <span>
#include <vector>

#include "afc/agent/policy.hpp"

namespace afc::agent {

struct PpoConfig {
    double clip = 0.2;
    double gamma = 0.99;
    double lambda = 0.95;
    double learning_rate = 3e-4;
    int epochs = 10;
    int minibatch = 480;
    double entropy_coef = 0.005;
    double value_coef = 0.5;
    double max_grad_norm = 0.5;
    double q_max = 0.176;
    int hidden = 128;
    double init_log_std = -0.5;

    /// Throws ConfigError when clip is outside (0, 1) or gamma/lambda outside (0, 1].
    void validate() const;
};

struct Transition {
    std::vector<double> obs;
    double raw = 0.0;
    double log_prob = 0.0;
    double value = 0.0;
    double reward = 0.0;
    bool done = false;
};

struct Advantages {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// Generalised advantage estimation over one trajectory:
/// delta_t = r_t + gamma v_{t+1} - v_t, A_t = delta_t + gamma lambda A_{t+1},
/// with v_T = bootstrap_value; returns = advantages + values.
Advantages gae(std::span<const double> rewards, std::span<const double> values, double bootstrap_value,
               double gamma, double lambda);

/// Loss value, diagnostics and (optionally) gradient for one minibatch. The
/// advantages are used as given.
template <typename T>
struct LossEval {
    double loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
    std::vector<T> grad;
};

/// loss = -mean(min(rho A, clip(rho, 1-eps, 1+eps) A)) + c_v mean((V - R)^2) - c_e H
template <typename T>
LossEval<T> ppo_loss(const PolicyParams<T>& params, std::span<const Transition> batch,
                     std::span<const double> advantages, std::span<const double> returns,
                     const PpoConfig& config, bool with_grad);

/// Plain Adam.
template <typename T>
class Adam {
public:
    Adam() = default;
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::span<T> params, std::span<const T> grad);
    void set_learning_rate(double lr) { lr_ = lr; }
    long steps() const { return t_; }

private:
    double lr_ = 3e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-5;
    long t_ = 0;
    std::vector<double> m_, v_;
};

struct UpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
    double grad_norm = 0.0;
    int minibatches = 0;
};

/// Clipped-surrogate update over `epochs` shuffled passes. Advantages are
/// normalised across the whole batch first. Throws NumericalError on a
/// non-finite loss, leaving `params` as they were before that minibatch.
template <typename T>
UpdateStats ppo_update(PolicyParams<T>& params, Adam<T>& optimiser, std::span<const Transition> batch,
                       std::span<const double> advantages, std::span<const double> returns,
                       const PpoConfig& config, Rng& rng);

/// Max relative error between the analytic gradient of ppo_loss and central
/// finite differences (step `eps`) over every parameter. The relative error
/// uses max(|a|, |fd|, 1e-6) as denominator.
double grad_check(const PolicyParams<double>& params, std::span<const Transition> batch,
                  std::span<const double> advantages, std::span<const double> returns,
                  const PpoConfig& config, double eps = 1e-5);

}  // namespace afc::agent
