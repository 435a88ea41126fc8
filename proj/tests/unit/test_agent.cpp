#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "afc/agent/model_io.hpp"
#include "afc/agent/ppo.hpp"
#include "afc/errors.hpp"

using namespace afc;
using namespace afc::agent;

namespace {

std::vector<double> random_obs(int n, std::mt19937_64& g, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> o(static_cast<std::size_t>(n));
    for (auto& x : o) x = d(g);
    return o;
}

/// Small network with every parameter drawn at random so no gradient path is
/// trivially zero.
PolicyParams<double> random_params(int obs, int hidden, std::uint64_t seed) {
    auto p = PolicyParams<double>::initialised(obs, hidden, seed, -0.7);
    std::mt19937_64 g(seed + 1);
    std::normal_distribution<double> d(0.0, 0.3);
    for (std::size_t i = 0; i < p.data().size(); ++i) {
        if (i != p.log_std_index()) p.data()[i] += d(g);
    }
    return p;
}

std::vector<Transition> random_batch(const PolicyParams<double>& p, int n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    Rng rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<Transition> batch;
    for (int i = 0; i < n; ++i) {
        Transition t;
        t.obs = random_obs(p.obs_dim(), g);
        auto a = act<double>(t.obs, p, ActMode::Stochastic, rng, 0.176);
        t.raw = a.raw;
        // old policy differs a little so ratios are not exactly one
        t.log_prob = a.log_prob + 0.05 * d(g);
        t.value = a.value;
        batch.push_back(t);
    }
    return batch;
}

/// Independent density of q = q_max tanh(x), x ~ N(mu, sigma^2).
double density_oracle(double q, double mu, double sigma, double q_max) {
    const double u = q / q_max;
    const double x = 0.5 * std::log((1 + u) / (1 - u));
    const double pdf = std::exp(-0.5 * std::pow((x - mu) / sigma, 2)) / (sigma * std::sqrt(2 * std::numbers::pi));
    return pdf / (q_max * (1 - u * u));
}

}  // namespace

TEST_CASE("fresh policy is centred: zero mean and zero value") {
    auto p = PolicyParams<float>::initialised(255, 128, 7, -0.5);
    std::mt19937_64 g(1);
    Rng rng(3);
    const auto obs = random_obs(255, g);
    auto a = act<float>(obs, p, ActMode::Deterministic, rng, 0.176);
    CHECK(a.q == 0.0);
    CHECK(a.value == 0.0);
    CHECK(p.log_std() == doctest::Approx(-0.5));
}

TEST_CASE("hidden layers are orthogonal with gain sqrt 2") {
    auto p = PolicyParams<double>::initialised(20, 8, 11, -0.5);
    const auto& s = p.actor_shape();
    const double* w = p.data().data() + s.weight_offset(0);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            double d = 0;
            for (int k = 0; k < 20; ++k) d += w[i * 20 + k] * w[j * 20 + k];
            CHECK(d == doctest::Approx(i == j ? 2.0 : 0.0).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("actions stay strictly inside the bounds") {
    auto p = random_params(10, 8, 5);
    p.data()[p.log_std_index()] = 2.0;
    std::mt19937_64 g(9);
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const auto obs = random_obs(10, g, 50.0);
        auto a = act<double>(obs, p, ActMode::Stochastic, rng, 0.176);
        REQUIRE(std::abs(a.q) < 0.176);
        REQUIRE(std::isfinite(a.log_prob));
    }
}

TEST_CASE("seeded sampling is reproducible") {
    auto p = random_params(10, 8, 5);
    std::mt19937_64 g(4);
    const auto obs = random_obs(10, g);
    Rng a(42), b(42);
    for (int i = 0; i < 50; ++i) {
        CHECK(act<double>(obs, p, ActMode::Stochastic, a, 0.176).q ==
              act<double>(obs, p, ActMode::Stochastic, b, 0.176).q);
    }
    CHECK(PolicyParams<float>::initialised(30, 16, 3, -0.5).data() ==
          PolicyParams<float>::initialised(30, 16, 3, -0.5).data());
}

TEST_CASE("log-probability matches the change-of-variables density") {
    auto p = random_params(10, 8, 21);
    std::mt19937_64 g(8);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto obs = random_obs(10, g);
        auto a = act<double>(obs, p, ActMode::Stochastic, rng, 0.176);
        CHECK(log_density<double>(obs, p, a.raw, 0.176) == doctest::Approx(a.log_prob).epsilon(1e-12));
        std::vector<double> x(obs);
        const double mu = p.mean(x);
        const double oracle = std::log(density_oracle(a.q, mu, std::exp(p.log_std()), 0.176));
        if (std::abs(a.raw) < 5) CHECK(a.log_prob == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("squashed density integrates to one") {
    const double q_max = 0.176;
    for (double mu : {-1.0, 0.0, 0.4}) {
        const int n = 200000;
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            const double q = -q_max + (i + 0.5) * 2 * q_max / n;
            const double raw = std::atanh(q / q_max);
            sum += std::exp(squashed_log_density(raw, mu, std::log(0.6), q_max)) * 2 * q_max / n;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("GAE against direct summation") {
    std::mt19937_64 g(12);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 200; ++trial) {
        const int T = 1 + static_cast<int>(g() % 16);
        std::vector<double> r(T), v(T);
        for (auto& x : r) x = d(g);
        for (auto& x : v) x = d(g);
        const double boot = d(g), gamma = 0.9 + 0.1 * (g() % 100) / 100.0, lambda = (g() % 101) / 100.0;
        auto out = gae(r, v, boot, gamma, lambda);
        for (int t = 0; t < T; ++t) {
            double a = 0;
            for (int l = 0; t + l < T; ++l) {
                const double next = t + l + 1 < T ? v[t + l + 1] : boot;
                a += std::pow(gamma * lambda, l) * (r[t + l] + gamma * next - v[t + l]);
            }
            REQUIRE(out.advantages[t] == doctest::Approx(a).epsilon(1e-12));
            REQUIRE(out.returns[t] == doctest::Approx(a + v[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("GAE special cases") {
    std::vector<double> r{1.0, -2.0, 0.5}, v{0.3, 0.1, -0.4};
    auto td = gae(r, v, 0.7, 0.99, 0.0);
    CHECK(td.advantages[0] == doctest::Approx(1.0 + 0.99 * 0.1 - 0.3));
    CHECK(td.advantages[2] == doctest::Approx(0.5 + 0.99 * 0.7 + 0.4));
    std::vector<double> z(3, 0.0);
    auto zero = gae(z, z, 0.0, 0.99, 0.95);
    for (double a : zero.advantages) CHECK(a == 0.0);
}

TEST_CASE("PPO gradient matches finite differences") {
    PpoConfig cfg;
    cfg.entropy_coef = 0.01;
    for (int n : {1, 7}) {
        auto p = random_params(6, 8, 100 + n);
        auto batch = random_batch(p, n, 200 + n);
        std::mt19937_64 g(n);
        std::normal_distribution<double> d;
        std::vector<double> adv(n), ret(n);
        for (auto& x : adv) x = d(g);
        for (auto& x : ret) x = d(g);
        CHECK(grad_check(p, batch, adv, ret, cfg) <= 1e-4);
    }
}

TEST_CASE("clipped branch carries no policy gradient") {
    PpoConfig cfg;
    cfg.entropy_coef = 0.0;
    cfg.value_coef = 0.0;
    auto p = random_params(6, 8, 3);
    auto batch = random_batch(p, 1, 4);
    // stored probability such that rho = 1.5
    batch[0].log_prob = log_density<double>(batch[0].obs, p, batch[0].raw, cfg.q_max) - std::log(1.5);
    std::vector<double> adv{2.0}, ret{0.0};
    auto pos = ppo_loss<double>(p, batch, adv, ret, cfg, true);
    CHECK(pos.policy_loss == doctest::Approx(-1.2 * 2.0));
    CHECK(pos.clip_fraction == 1.0);
    for (double gval : pos.grad) CHECK(gval == 0.0);

    // negative advantage: min picks the unclipped term, gradient flows
    adv[0] = -2.0;
    auto neg = ppo_loss<double>(p, batch, adv, ret, cfg, true);
    CHECK(neg.policy_loss == doctest::Approx(1.5 * 2.0));
    double norm = 0;
    for (double gval : neg.grad) norm += gval * gval;
    CHECK(norm > 0.0);
}

TEST_CASE("updates without signal leave parameters unchanged") {
    auto p = random_params(6, 8, 9);
    auto batch = random_batch(p, 12, 10);
    std::vector<double> ret(12);
    for (int i = 0; i < 12; ++i) ret[i] = p.value(std::vector<double>(batch[i].obs));
    const auto before = p.data();

    SUBCASE("zero advantage, no entropy or value term") {
        PpoConfig cfg;
        cfg.entropy_coef = 0.0;
        cfg.value_coef = 0.0;
        cfg.minibatch = 5;
        std::vector<double> adv(12, 0.0);
        Adam<double> opt(p.data().size(), cfg.learning_rate);
        Rng rng(1);
        ppo_update<double>(p, opt, batch, adv, ret, cfg, rng);
        CHECK(p.data() == before);
    }
    SUBCASE("zero learning rate") {
        PpoConfig cfg;
        cfg.learning_rate = 0.0;
        std::vector<double> adv(12);
        for (int i = 0; i < 12; ++i) adv[i] = i - 5.5;
        Adam<double> opt(p.data().size(), 0.0);
        Rng rng(1);
        ppo_update<double>(p, opt, batch, adv, ret, cfg, rng);
        CHECK(p.data() == before);
    }
}

TEST_CASE("a duplicated transition weighs twice") {
    PpoConfig cfg;
    auto p = random_params(6, 8, 15);
    auto two = random_batch(p, 2, 16);
    std::vector<Transition> t1{two[0]}, t2{two[1]}, dup{two[0], two[0], two[1]};
    std::vector<double> a1{0.8}, a2{-1.1}, r1{0.2}, r2{-0.3};
    auto g1 = ppo_loss<double>(p, t1, a1, r1, cfg, true).grad;
    auto g2 = ppo_loss<double>(p, t2, a2, r2, cfg, true).grad;
    std::vector<double> ad{0.8, 0.8, -1.1}, rd{0.2, 0.2, -0.3};
    auto gd = ppo_loss<double>(p, dup, ad, rd, cfg, true).grad;
    for (std::size_t i = 0; i < gd.size(); ++i) {
        REQUIRE(gd[i] == doctest::Approx((2 * g1[i] + g2[i]) / 3).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("training on a bandit moves the mean toward rewarded actions") {
    // reward = -(q - 0.1)^2; one step, so advantage = r - v
    PpoConfig cfg;
    cfg.minibatch = 64;
    cfg.learning_rate = 3e-3;
    auto p = PolicyParams<double>::initialised(4, 16, 1, -1.0);
    Adam<double> opt(p.data().size(), cfg.learning_rate);
    Rng rng(2);
    std::vector<double> obs{0.5, -0.2, 0.1, 0.3};
    for (int it = 0; it < 40; ++it) {
        std::vector<Transition> batch;
        std::vector<double> adv, ret;
        for (int i = 0; i < 256; ++i) {
            auto a = act<double>(obs, p, ActMode::Stochastic, rng, cfg.q_max);
            Transition t{obs, a.raw, a.log_prob, a.value, -100 * std::pow(a.q - 0.1, 2), true};
            adv.push_back(t.reward - a.value);
            ret.push_back(t.reward);
            batch.push_back(t);
        }
        ppo_update<double>(p, opt, batch, adv, ret, cfg, rng);
    }
    auto a = act<double>(obs, p, ActMode::Deterministic, rng, cfg.q_max);
    CHECK(a.q == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("non-finite inputs are rejected") {
    auto p = random_params(4, 8, 1);
    Rng rng(1);
    std::vector<double> obs{0.0, NAN, 0.0, 0.0};
    CHECK_THROWS_AS(act<double>(obs, p, ActMode::Stochastic, rng, 0.176), NumericalError);
    PpoConfig cfg;
    auto batch = random_batch(p, 3, 2);
    std::vector<double> adv{1, 2, NAN}, ret{0, 0, 0};
    Adam<double> opt(p.data().size(), 1e-3);
    const auto before = p.data();
    CHECK_THROWS_AS(ppo_update<double>(p, opt, batch, adv, ret, cfg, rng), NumericalError);
    CHECK(p.data() == before);
}

TEST_CASE("model file round trip and corruption") {
    auto p = PolicyParams<float>::initialised(255, 32, 4, -0.5);
    p.data()[p.data().size() - 1] = 0.25f;
    auto bytes = save_model(p);
    auto q = load_model(bytes);
    CHECK(q.data() == p.data());
    CHECK(q.obs_dim() == 255);
    CHECK(q.hidden() == 32);

    const auto path = (std::filesystem::temp_directory_path() / "afc_model_rt.bin").string();
    save_model_file(path, p);
    CHECK(load_model_file(path).data() == p.data());
    std::filesystem::remove(path);

    auto flipped = bytes;
    flipped[100] ^= 0x10;
    CHECK_THROWS_AS(load_model(flipped), FormatError);
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    CHECK_THROWS_AS(load_model(truncated), FormatError);
    auto version = bytes;
    version[4] = 9;
    CHECK_THROWS_WITH_AS(load_model(version), doctest::Contains("version"), FormatError);
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.bin"), ConfigError);
}
