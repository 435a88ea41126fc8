#include "afc/agent/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "afc/errors.hpp"

namespace afc::agent {

void PpoConfig::validate() const {
    if (!(clip > 0.0 && clip < 1.0)) throw ConfigError("ppo.clip must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma must lie in (0, 1]");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("ppo.lambda must lie in (0, 1]");
    if (!(learning_rate >= 0.0)) throw ConfigError("ppo.learning_rate must be non-negative");
    if (epochs < 1 || minibatch < 1) throw ConfigError("ppo.epochs and ppo.minibatch must be positive");
    if (hidden < 1) throw ConfigError("ppo.hidden must be positive");
    if (!(q_max > 0.0)) throw ConfigError("q_max must be positive");
}

Advantages gae(std::span<const double> rewards, std::span<const double> values, double bootstrap_value,
               double gamma, double lambda) {
    const std::size_t n = rewards.size();
    Advantages out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double next_value = bootstrap_value;
    double running = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double delta = rewards[t] + gamma * next_value - values[t];
        running = delta + gamma * lambda * running;
        out.advantages[t] = running;
        out.returns[t] = running + values[t];
        next_value = values[t];
    }
    return out;
}

template <typename T>
LossEval<T> ppo_loss(const PolicyParams<T>& params, std::span<const Transition> batch,
                     std::span<const double> advantages, std::span<const double> returns,
                     const PpoConfig& config, bool with_grad) {
    LossEval<T> out;
    const std::size_t b = batch.size();
    const double inv_b = 1.0 / static_cast<double>(b);
    if (with_grad) out.grad.assign(params.data().size(), T(0));

    const double log_std = static_cast<double>(params.log_std());
    const double inv_var = std::exp(-2.0 * log_std);
    const bool log_std_free = params.log_std_param() > static_cast<T>(log_std_min) &&
                              params.log_std_param() < static_cast<T>(log_std_max);
    double d_log_std = 0.0;

    Activations<T> actor_acts, critic_acts;
    std::vector<T> x;
    std::span<T> grad(out.grad);
    for (std::size_t s = 0; s < b; ++s) {
        const Transition& tr = batch[s];
        x.assign(tr.obs.begin(), tr.obs.end());
        const double mean = static_cast<double>(params.mean(x, with_grad ? &actor_acts : nullptr));
        const double value = static_cast<double>(params.value(x, with_grad ? &critic_acts : nullptr));
        const double logp = squashed_log_density(tr.raw, mean, log_std, config.q_max);
        const double log_ratio = logp - tr.log_prob;
        const double ratio = std::exp(log_ratio);
        const double adv = advantages[s];
        const double clipped = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
        const double surrogate = std::min(ratio * adv, clipped * adv);
        // the unclipped branch carries the gradient
        const bool active = adv >= 0.0 ? ratio <= 1.0 + config.clip : ratio >= 1.0 - config.clip;
        const double verr = value - returns[s];

        out.policy_loss -= surrogate * inv_b;
        out.value_loss += verr * verr * inv_b;
        out.clip_fraction += (std::abs(ratio - 1.0) > config.clip ? 1.0 : 0.0) * inv_b;
        out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;

        if (!with_grad) continue;
        const double d_logp = active ? -adv * ratio * inv_b : 0.0;
        const double diff = tr.raw - mean;
        const double d_mean = d_logp * diff * inv_var;
        d_log_std += d_logp * (diff * diff * inv_var - 1.0);
        mlp_backward<T>(params.actor_shape(), params.actor(), actor_acts, static_cast<T>(d_mean),
                        grad.first(params.actor_shape().param_count()));
        const double d_value = config.value_coef * 2.0 * verr * inv_b;
        mlp_backward<T>(params.critic_shape(), params.critic(), critic_acts, static_cast<T>(d_value),
                        grad.subspan(params.critic_offset(), params.critic_shape().param_count()));
    }
    out.entropy = log_std + 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));
    out.loss = out.policy_loss + config.value_coef * out.value_loss - config.entropy_coef * out.entropy;
    if (with_grad) {
        d_log_std -= config.entropy_coef;
        out.grad[params.log_std_index()] = log_std_free ? static_cast<T>(d_log_std) : T(0);
    }
    return out;
}

template <typename T>
void Adam<T>::step(std::span<T> params, std::span<const T> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = static_cast<double>(grad[i]);
        m_[i] = b1_ * m_[i] + (1.0 - b1_) * g;
        v_[i] = b2_ * v_[i] + (1.0 - b2_) * g * g;
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
    }
}

template <typename T>
UpdateStats ppo_update(PolicyParams<T>& params, Adam<T>& optimiser, std::span<const Transition> batch,
                       std::span<const double> advantages, std::span<const double> returns,
                       const PpoConfig& config, Rng& rng) {
    const std::size_t n = batch.size();
    if (n == 0) throw ConfigError("ppo_update: empty batch");

    const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    const double stddev = std::sqrt(var / static_cast<double>(n));
    std::vector<double> norm_adv(n);
    for (std::size_t i = 0; i < n; ++i) norm_adv[i] = (advantages[i] - mean) / (stddev + 1e-8);

    std::vector<std::size_t> order(n);
    std::vector<Transition> mb_batch;
    std::vector<double> mb_adv, mb_ret;
    UpdateStats stats;
    const std::size_t mb = std::min<std::size_t>(static_cast<std::size_t>(config.minibatch), n);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Fisher-Yates with our own draws keeps the permutation portable.
        for (std::size_t i = n; i-- > 1;) {
            const auto j = static_cast<std::size_t>(rng.engine() % (i + 1));
            std::swap(order[i], order[j]);
        }
        for (std::size_t start = 0; start < n; start += mb) {
            const std::size_t end = std::min(n, start + mb);
            mb_batch.clear();
            mb_adv.clear();
            mb_ret.clear();
            for (std::size_t i = start; i < end; ++i) {
                mb_batch.push_back(batch[order[i]]);
                mb_adv.push_back(norm_adv[order[i]]);
                mb_ret.push_back(returns[order[i]]);
            }
            auto eval = ppo_loss<T>(params, mb_batch, mb_adv, mb_ret, config, true);
            double norm2 = 0.0;
            for (T g : eval.grad) norm2 += static_cast<double>(g) * static_cast<double>(g);
            const double gnorm = std::sqrt(norm2);
            if (!std::isfinite(eval.loss) || !std::isfinite(gnorm)) {
                throw NumericalError("non-finite PPO loss; update aborted");
            }
            if (gnorm > config.max_grad_norm) {
                const T scale = static_cast<T>(config.max_grad_norm / gnorm);
                for (T& g : eval.grad) g *= scale;
            }
            optimiser.step(params.data(), eval.grad);
            params.clamp_log_std();

            stats.policy_loss += eval.policy_loss;
            stats.value_loss += eval.value_loss;
            stats.entropy += eval.entropy;
            stats.approx_kl += eval.approx_kl;
            stats.clip_fraction += eval.clip_fraction;
            stats.grad_norm += gnorm;
            ++stats.minibatches;
        }
    }
    const double k = 1.0 / stats.minibatches;
    stats.policy_loss *= k;
    stats.value_loss *= k;
    stats.entropy *= k;
    stats.approx_kl *= k;
    stats.clip_fraction *= k;
    stats.grad_norm *= k;
    return stats;
}

double grad_check(const PolicyParams<double>& params, std::span<const Transition> batch,
                  std::span<const double> advantages, std::span<const double> returns,
                  const PpoConfig& config, double eps) {
    const auto analytic = ppo_loss<double>(params, batch, advantages, returns, config, true).grad;
    PolicyParams<double> probe = params;
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.data().size(); ++i) {
        const double saved = probe.data()[i];
        probe.data()[i] = saved + eps;
        const double up = ppo_loss<double>(probe, batch, advantages, returns, config, false).loss;
        probe.data()[i] = saved - eps;
        const double down = ppo_loss<double>(probe, batch, advantages, returns, config, false).loss;
        probe.data()[i] = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
        worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
    }
    return worst;
}

template struct LossEval<float>;
template struct LossEval<double>;
template LossEval<float> ppo_loss<float>(const PolicyParams<float>&, std::span<const Transition>, std::span<const double>, std::span<const double>, const PpoConfig&, bool);
template LossEval<double> ppo_loss<double>(const PolicyParams<double>&, std::span<const Transition>, std::span<const double>, std::span<const double>, const PpoConfig&, bool);
template class Adam<float>;
template class Adam<double>;
template UpdateStats ppo_update<float>(PolicyParams<float>&, Adam<float>&, std::span<const Transition>, std::span<const double>, std::span<const double>, const PpoConfig&, Rng&);
template UpdateStats ppo_update<double>(PolicyParams<double>&, Adam<double>&, std::span<const Transition>, std::span<const double>, std::span<const double>, const PpoConfig&, Rng&);

}  // namespace afc::agent
