#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "afc/agent/network.hpp"

namespace afc::agent {

/// Seeded normal sampler. Holds the distribution so its cached second
/// variate is part of the reproducible state.
struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double gaussian() { return normal(engine); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine); }

    std::mt19937_64 engine;
    std::normal_distribution<double> normal{0.0, 1.0};
};

inline constexpr double log_std_min = -20.0;
inline constexpr double log_std_max = 2.0;

/// Actor (obs -> H -> H -> mean), state-independent log-std, and critic
/// (obs -> H -> H -> value), stored contiguously as [actor | log_std | critic].
template <typename T>
class PolicyParams {
public:
    PolicyParams() = default;
    PolicyParams(int obs_dim, int hidden);

    /// Orthogonal hidden layers (gain sqrt 2), zero output layers.
    static PolicyParams initialised(int obs_dim, int hidden, std::uint64_t seed, double init_log_std);

    const MlpShape& actor_shape() const { return actor_; }
    const MlpShape& critic_shape() const { return critic_; }
    int obs_dim() const { return obs_dim_; }
    int hidden() const { return hidden_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }
    std::span<const T> actor() const { return std::span<const T>(data_).first(actor_.param_count()); }
    std::span<const T> critic() const {
        return std::span<const T>(data_).subspan(critic_offset(), critic_.param_count());
    }
    std::size_t log_std_index() const { return actor_.param_count(); }
    std::size_t critic_offset() const { return actor_.param_count() + 1; }

    T log_std_param() const { return data_[log_std_index()]; }
    /// Log-std in use, clamped to [log_std_min, log_std_max].
    T log_std() const;
    void clamp_log_std();

    T mean(std::span<const T> obs, Activations<T>* acts = nullptr) const {
        return mlp_forward<T>(actor_, actor(), obs, acts);
    }
    T value(std::span<const T> obs, Activations<T>* acts = nullptr) const {
        return mlp_forward<T>(critic_, critic(), obs, acts);
    }

    template <typename U>
    PolicyParams<U> cast() const {
        PolicyParams<U> out(obs_dim_, hidden_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

private:
    int obs_dim_ = 0;
    int hidden_ = 0;
    MlpShape actor_;
    MlpShape critic_;
    std::vector<T> data_;
};

enum class ActMode { Stochastic, Deterministic };

struct ActResult {
    double q = 0.0;         ///< jet mass flow rate, strictly inside (-q_max, q_max)
    double raw = 0.0;       ///< pre-squash Gaussian sample
    double log_prob = 0.0;  ///< log density of q (tanh change of variables included)
    double value = 0.0;
};

/// Log density of the squashed action produced by raw sample `raw`.
double squashed_log_density(double raw, double mean, double log_std, double q_max);

/// Throws NumericalError if the observation or network output is not finite.
template <typename T>
ActResult act(std::span<const double> obs, const PolicyParams<T>& params, ActMode mode, Rng& rng,
              double q_max);

/// Recomputes the log density of a stored raw action under `params`.
template <typename T>
double log_density(std::span<const double> obs, const PolicyParams<T>& params, double raw, double q_max);

}  // namespace afc::agent
