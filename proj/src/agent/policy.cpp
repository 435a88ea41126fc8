#include "afc/agent/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "afc/errors.hpp"

namespace afc::agent {

namespace {

/// Fills a rows x cols block with orthonormal rows (or columns when
/// rows > cols) scaled by `gain`, via Gram-Schmidt on Gaussian draws.
void orthogonal(std::span<double> out, int rows, int cols, double gain, Rng& rng) {
    const bool transpose = rows > cols;
    const int r = transpose ? cols : rows;
    const int c = transpose ? rows : cols;
    std::vector<double> m(static_cast<std::size_t>(r) * c);
    for (auto& x : m) x = rng.gaussian();
    for (int i = 0; i < r; ++i) {
        double* vi = m.data() + static_cast<std::size_t>(i) * c;
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                const double* vj = m.data() + static_cast<std::size_t>(j) * c;
                double d = 0.0;
                for (int k = 0; k < c; ++k) d += vi[k] * vj[k];
                for (int k = 0; k < c; ++k) vi[k] -= d * vj[k];
            }
        }
        double n = 0.0;
        for (int k = 0; k < c; ++k) n += vi[k] * vi[k];
        n = std::sqrt(n);
        for (int k = 0; k < c; ++k) vi[k] /= n;
    }
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double v = transpose ? m[static_cast<std::size_t>(j) * c + i] : m[static_cast<std::size_t>(i) * c + j];
            out[static_cast<std::size_t>(i) * cols + j] = gain * v;
        }
    }
}

}  // namespace

template <typename T>
PolicyParams<T>::PolicyParams(int obs_dim, int hidden)
    : obs_dim_(obs_dim), hidden_(hidden), actor_({obs_dim, hidden, hidden, 1}),
      critic_({obs_dim, hidden, hidden, 1}),
      data_(actor_.param_count() + 1 + critic_.param_count(), T(0)) {}

template <typename T>
PolicyParams<T> PolicyParams<T>::initialised(int obs_dim, int hidden, std::uint64_t seed, double init_log_std) {
    PolicyParams<T> p(obs_dim, hidden);
    Rng rng(seed);
    std::vector<double> block;
    auto init_net = [&](const MlpShape& shape, std::size_t base) {
        const auto& sz = shape.sizes();
        for (std::size_t l = 0; l + 1 < shape.layers(); ++l) {
            block.assign(static_cast<std::size_t>(sz[l]) * sz[l + 1], 0.0);
            orthogonal(block, sz[l + 1], sz[l], std::numbers::sqrt2, rng);
            for (std::size_t i = 0; i < block.size(); ++i) {
                p.data_[base + shape.weight_offset(l) + i] = static_cast<T>(block[i]);
            }
        }
        // output layer and all biases stay zero
    };
    init_net(p.actor_, 0);
    init_net(p.critic_, p.critic_offset());
    p.data_[p.log_std_index()] = static_cast<T>(init_log_std);
    return p;
}

template <typename T>
T PolicyParams<T>::log_std() const {
    return std::clamp(log_std_param(), static_cast<T>(log_std_min), static_cast<T>(log_std_max));
}

template <typename T>
void PolicyParams<T>::clamp_log_std() {
    data_[log_std_index()] = log_std();
}

double squashed_log_density(double raw, double mean, double log_std, double q_max) {
    const double z = (raw - mean) * std::exp(-log_std);
    const double gauss = -0.5 * z * z - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
    // log(1 - tanh^2 x) = 2 (log 2 - x - softplus(-2x)), stable for large |x|
    const double a = std::abs(raw);
    const double log_dtanh = 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
    return gauss - log_dtanh - std::log(q_max);
}

template <typename T>
ActResult act(std::span<const double> obs, const PolicyParams<T>& params, ActMode mode, Rng& rng,
              double q_max) {
    std::vector<T> x(obs.begin(), obs.end());
    for (T v : x) {
        if (!std::isfinite(static_cast<double>(v))) throw NumericalError("non-finite observation");
    }
    const double mean = static_cast<double>(params.mean(x));
    const double value = static_cast<double>(params.value(x));
    if (!std::isfinite(mean) || !std::isfinite(value)) throw NumericalError("non-finite policy output");
    const double log_std = static_cast<double>(params.log_std());

    ActResult r;
    r.raw = mode == ActMode::Deterministic ? mean : mean + std::exp(log_std) * rng.gaussian();
    // tanh saturates to exactly 1 in floating point for |raw| > ~19
    const double bound = std::nextafter(q_max, 0.0);
    r.q = std::clamp(q_max * std::tanh(r.raw), -bound, bound);
    r.log_prob = squashed_log_density(r.raw, mean, log_std, q_max);
    r.value = value;
    return r;
}

template <typename T>
double log_density(std::span<const double> obs, const PolicyParams<T>& params, double raw, double q_max) {
    std::vector<T> x(obs.begin(), obs.end());
    return squashed_log_density(raw, static_cast<double>(params.mean(x)), static_cast<double>(params.log_std()),
                                q_max);
}

template class PolicyParams<float>;
template class PolicyParams<double>;
template ActResult act<float>(std::span<const double>, const PolicyParams<float>&, ActMode, Rng&, double);
template ActResult act<double>(std::span<const double>, const PolicyParams<double>&, ActMode, Rng&, double);
template double log_density<float>(std::span<const double>, const PolicyParams<float>&, double, double);
template double log_density<double>(std::span<const double>, const PolicyParams<double>&, double, double);

}  // namespace afc::agent
