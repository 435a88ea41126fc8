#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "../support/flow_cases.hpp"
#include "afc/broker/server.hpp"
#include "afc/errors.hpp"
#include "afc/orchestrator/config.hpp"
#include "afc/orchestrator/evaluate.hpp"
#include "afc/orchestrator/exports.hpp"
#include "afc/orchestrator/rewards.hpp"
#include "afc/orchestrator/signal.hpp"
#include "afc/orchestrator/simulation.hpp"
#include "afc/orchestrator/trainer.hpp"
#include "afc/orchestrator/worker.hpp"
#include "afc/util/bytes.hpp"

using namespace afc;
using namespace afc::orchestrator;
namespace fs = std::filesystem;

TEST_CASE("local reward") {
    const auto r = local_reward(1.409, 1.278, 0.029, 0.3);
    CHECK(r.total == doctest::Approx(0.1223).epsilon(1e-12));
    CHECK(std::abs(r.drag - 0.131) <= 1e-12);
    CHECK(std::abs(r.lift + 0.0087) <= 1e-12);
    CHECK(r.total == r.drag + r.lift);
    CHECK(local_reward(1.3, 1.3, 0.0, 0.3).total == 0.0);
    CHECK(local_reward(1.3, 1.2, -0.4, 0.3).total == local_reward(1.3, 1.2, 0.4, 0.3).total);
}

TEST_CASE("aggregate reward") {
    const std::vector<double> r{1.0, 0.5, 0.0, 0.5};
    const auto R = aggregate_reward(r, 0.8);
    const double want[] = {0.9, 0.5, 0.1, 0.5};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(R[i] - want[i]) <= 1e-12);
    CHECK(aggregate_reward(r, 1.0) == r);
    const std::vector<double> c(7, -0.3);
    for (double x : aggregate_reward(c, 0.37)) CHECK(std::abs(x + 0.3) <= 1e-12);
    CHECK_THROWS_AS(aggregate_reward(std::vector<double>{}, 0.5), ConfigError);
}

TEST_CASE("aggregation preserves the mean and the argmax") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), b(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(g() % 12);
        std::vector<double> r(n);
        for (auto& x : r) x = u(g);
        const double beta = trial % 10 == 0 ? 1.0 : b(g);
        const auto R = aggregate_reward(r, beta);
        double mr = 0, mR = 0;
        for (int i = 0; i < n; ++i) {
            mr += r[i] / n;
            mR += R[i] / n;
        }
        REQUIRE(std::abs(mr - mR) <= 1e-12);
        if (beta > 0) {
            REQUIRE(std::max_element(R.begin(), R.end()) - R.begin() ==
                    std::max_element(r.begin(), r.end()) - r.begin());
        }
    }
}

TEST_CASE("signal statistics of a sinusoid") {
    std::vector<double> s;
    for (int i = 0; i <= 4000; ++i) s.push_back(std::sin(2 * std::numbers::pi * 0.17 * 0.05 * i));
    const auto st = signal_statistics(s, 0.05);
    CHECK(st.has_peak);
    CHECK(std::abs(st.st - 0.17) <= 1e-3);
    CHECK(std::abs(st.mean) <= 1e-3);
    CHECK(std::abs(st.sigma - std::sqrt(0.5)) <= 1e-3);
}

TEST_CASE("constant series has no peak") {
    std::vector<double> s(4001, 1.25);
    const auto st = signal_statistics(s, 0.05);
    CHECK_FALSE(st.has_peak);
    CHECK(st.sigma == 0.0);
    CHECK(st.mean == doctest::Approx(1.25));
}

TEST_CASE("harmonic is found as the secondary peak") {
    std::vector<double> s;
    for (int i = 0; i <= 4000; ++i) {
        const double t = 0.05 * i;
        s.push_back(std::sin(2 * std::numbers::pi * 0.161 * t) + 0.3 * std::sin(2 * std::numbers::pi * 0.322 * t));
    }
    const auto st = signal_statistics(s, 0.05);
    REQUIRE(st.peaks.size() >= 2);
    CHECK(std::abs(st.peaks[0].st - 0.161) <= 1e-3);
    CHECK(std::abs(st.peaks[1].st - 0.322) <= 1e-3);
}

TEST_CASE("white noise has no peak") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> d;
    std::vector<double> s(4001);
    for (auto& x : s) x = d(g);
    CHECK_FALSE(signal_statistics(s, 0.05).has_peak);
}

TEST_CASE("short series are rejected") {
    std::vector<double> s(100, 0.0);
    CHECK_THROWS_AS(signal_statistics(s, 0.05), ConfigError);
}

TEST_CASE("resampling is exact for linear data") {
    std::vector<double> t{0.0, 0.3, 0.35, 1.0}, y;
    for (double x : t) y.push_back(2 * x - 1);
    const auto r = resample(t, y, 0.1);
    REQUIRE(r.size() == 11);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(2 * 0.1 * i - 1));
}

TEST_CASE("run config parsing") {
    SUBCASE("defaults are the desk profile") {
        const auto c = parse_run_config("");
        CHECK(c.sim.h == doctest::Approx(0.04));
        CHECK(c.sim.n_pe == 4);
        CHECK(c.train.n_cfd == 2);
        CHECK(c.train.n_episodes == 30);
        CHECK(c.ppo.hidden == 128);
        CHECK_NOTHROW(c.validate());
    }
    SUBCASE("values, comments and sections") {
        const auto c = parse_run_config("# desk\n[sim]\nh = 0.1 ; coarse\nn_pe=2\npreconditioner = jacobi\n"
                                        "[train]\nseed = 9\n[io]\nout = /tmp/x\n");
        CHECK(c.sim.h == 0.1);
        CHECK(c.sim.n_pe == 2);
        CHECK_FALSE(c.sim.spectral_preconditioner);
        CHECK(c.train.seed == 9);
        CHECK(c.io.out == "/tmp/x");
    }
    SUBCASE("canonical text round trips exactly") {
        auto c = parse_run_config("[sim]\nh = 0.033333333333333333\n[ppo]\nlearning_rate = 1e-4\n");
        const auto again = parse_run_config(to_text(c));
        CHECK(to_text(again) == to_text(c));
        CHECK(again.sim.h == c.sim.h);
    }
    SUBCASE("errors name the line and key") {
        CHECK_THROWS_WITH_AS(parse_run_config("[sim]\n\nbogus = 1\n"),
                             doctest::Contains("line 3: unknown key 'sim.bogus'"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config("[sim]\nh = fast\n"), doctest::Contains("line 2"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config("[sim]\nh = fast\n"), doctest::Contains("sim.h"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config("[nope]\n"), doctest::Contains("unknown section"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config("h = 1\n"), doctest::Contains("before any section"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config("[jets]\nenabled = maybe\n"), doctest::Contains("jets.enabled"),
                             ConfigError);
        CHECK_THROWS_WITH_AS(load_run_config("/no/such/file.ini"), doctest::Contains("/no/such/file.ini"),
                             ConfigError);
    }
}

namespace {

RunConfig tiny_config(int n_cfd, int n_pe, int actions) {
    RunConfig c;
    c.sim = testing::small_cylinder_config();
    c.sim.n_pe = n_pe;
    c.train.n_cfd = n_cfd;
    c.train.actions_per_episode = actions;
    c.train.t_episode = 0.1 * actions;
    c.train.n_episodes = 2;
    c.train.action_timeout_ms = 20000;
    c.train.worker_timeout_ms = 20000;
    c.ppo.hidden = 8;
    c.ppo.minibatch = 8;
    c.ppo.epochs = 2;
    c.baseline.snapshots = 2;
    return c;
}

/// Snapshots of the small case after a short uncontrolled run.
std::string make_snapshots(const RunConfig& c, const std::string& name) {
    const auto dir = (fs::temp_directory_path() / name).string();
    fs::create_directories(dir + "/snapshots");
    Simulation sim(c.sim, c.jets);
    sim.reset_perturbed(0.2);
    const std::vector<double> zero(static_cast<std::size_t>(c.sim.n_pe), 0.0);
    for (int k = 0; k < c.baseline.snapshots; ++k) {
        sim.advance(zero, 0.2);
        util::write_file(snapshot_path(dir + "/snapshots", k), sim.snapshot());
    }
    return dir;
}

BaselineStats fake_baseline() {
    BaselineStats b;
    b.mean_cd = 1.4;
    b.st = 0.2;
    b.sigma_cl = 0.2;
    return b;
}

}  // namespace

TEST_CASE("actuation ramps continuously between intervals") {
    auto c = tiny_config(1, 2, 1);
    c.sim.n_pe = 1;
    Simulation sim(c.sim, c.jets);
    std::vector<double> ts, qs;
    auto obs = [&](const flow::FlowField& f, const flow::ForceRecord&, std::span<const double> q) {
        ts.push_back(f.t);
        qs.push_back(q[0]);
    };
    const double targets[] = {0.1, -0.05, 0.176, 0.0};
    for (double q : targets) {
        const double tq[] = {q};
        sim.advance(tq, 0.3, obs);
    }
    CHECK(sim.field().t == doctest::Approx(1.2).epsilon(1e-12));
    // piecewise linear through the knots (0,0), (0.3,0.1), (0.6,-0.05), ...
    const double knots_t[] = {0.0, 0.3, 0.6, 0.9, 1.2};
    const double knots_q[] = {0.0, 0.1, -0.05, 0.176, 0.0};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        int k = std::min(3, static_cast<int>(ts[i] / 0.3 - 1e-9));
        const double w = (ts[i] - knots_t[k]) / 0.3;
        REQUIRE(qs[i] == doctest::Approx(knots_q[k] + w * (knots_q[k + 1] - knots_q[k])).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < qs.size(); ++i) REQUIRE(std::abs(qs[i] - qs[i - 1]) < 0.05);
}

TEST_CASE("episode over the broker with thread workers") {
    const auto cfg = tiny_config(2, 2, 4);
    const auto dir = make_snapshots(cfg, "afc_orch_episode");
    broker::Server server("127.0.0.1:0", 64 << 20);
    const std::string addr = "127.0.0.1:" + std::to_string(server.port());
    ThreadLauncher launcher([&](int env) { run_worker({addr, env, dir + "/snapshots", cfg}); });
    broker::Client client(addr);
    Trainer trainer(cfg, fake_baseline(), 2, client, launcher);
    CHECK(trainer.t_action() == doctest::Approx(0.1));

    auto data = trainer.run_episode(0);
    REQUIRE(data.transitions.size() == 4u * 2 * 2);
    for (std::size_t i = 0; i < data.transitions.size(); ++i) {
        CHECK(data.env_of[i] == static_cast<int>(i / 8));
        CHECK(data.pe_of[i] == static_cast<int>(i / 4 % 2));
        CHECK(data.transitions[i].done == (i % 4 == 3));
        CHECK(data.transitions[i].obs.size() == 255u);
        CHECK(std::isfinite(data.transitions[i].reward));
    }
    // 2D: both pseudo-environments of one simulation see the same state and reward
    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(data.transitions[s].obs == data.transitions[4 + s].obs);
        CHECK(data.transitions[s].reward == data.transitions[4 + s].reward);
    }
    CHECK(data.stats.total == doctest::Approx(data.stats.drag + data.stats.lift).epsilon(1e-14));
    CHECK(data.stats.aggregated == doctest::Approx(data.stats.total).epsilon(1e-12));
    CHECK(data.trace.rows() > 0);
    CHECK(data.trace.t(data.trace.rows() - 1) == doctest::Approx(0.4));
    CHECK(server.store().size() == 0);  // episode keys were collected

    trainer.shutdown_workers();
    fs::remove_all(dir);
}

TEST_CASE("a failing worker is retried once") {
    const auto cfg = tiny_config(1, 1, 2);
    const auto dir = make_snapshots(cfg, "afc_orch_retry");
    broker::Server server("127.0.0.1:0", 64 << 20);
    const std::string addr = "127.0.0.1:" + std::to_string(server.port());
    std::atomic<int> launches{0};
    ThreadLauncher launcher([&](int env) {
        if (launches++ == 0) throw std::runtime_error("simulated crash");
        run_worker({addr, env, dir + "/snapshots", cfg});
    });
    broker::Client client(addr);
    Trainer trainer(cfg, fake_baseline(), 2, client, launcher);
    auto data = trainer.run_episode(0);
    CHECK(data.stats.attempts == 2);
    CHECK(data.transitions.size() == 2u);
    trainer.shutdown_workers();

    std::atomic<int> always{0};
    ThreadLauncher broken([&](int) {
        ++always;
        throw std::runtime_error("crash");
    });
    broker::Client client2(addr);
    Trainer doomed(cfg, fake_baseline(), 2, client2, broken);
    CHECK_THROWS_AS(doomed.run_episode(0), WorkerFailure);
    CHECK(always == 2);
    fs::remove_all(dir);
}

TEST_CASE("worker reports a missing snapshot as a failure") {
    auto cfg = tiny_config(1, 1, 2);
    const auto dir = (fs::temp_directory_path() / "afc_orch_nosnap").string();
    broker::Server server("127.0.0.1:0", 64 << 20);
    const std::string addr = "127.0.0.1:" + std::to_string(server.port());
    ThreadLauncher launcher([&](int env) { run_worker({addr, env, dir, cfg}); });
    broker::Client client(addr);
    Trainer trainer(cfg, fake_baseline(), 1, client, launcher);
    CHECK_THROWS_WITH_AS(trainer.run_episode(0), doctest::Contains("reported a failure"), WorkerFailure);
    trainer.shutdown_workers();
}

TEST_CASE("training is reproducible and exports are consistent") {
    const auto cfg = tiny_config(2, 2, 3);
    const auto dir = make_snapshots(cfg, "afc_orch_train");
    auto run = [&] {
        broker::Server server("127.0.0.1:0", 64 << 20);
        const std::string addr = "127.0.0.1:" + std::to_string(server.port());
        ThreadLauncher launcher([&](int env) { run_worker({addr, env, dir + "/snapshots", cfg}); });
        broker::Client client(addr);
        Trainer trainer(cfg, fake_baseline(), 2, client, launcher);
        std::vector<float> last;
        auto hist = trainer.train([&](const EpisodeData&, const agent::PolicyParams<float>& p) { last = p.data(); });
        return std::make_pair(hist, last);
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.first.size() == 2);
    CHECK(a.second == b.second);
    write_rewards(dir + "/ra.csv", a.first);
    write_rewards(dir + "/rb.csv", b.first);
    CHECK(util::read_file(dir + "/ra.csv") == util::read_file(dir + "/rb.csv"));
    for (const auto& s : a.first) CHECK(s.total == s.drag + s.lift);
    fs::remove_all(dir);
}

TEST_CASE("zero policy evaluation matches uncontrolled flow") {
    auto cfg = tiny_config(1, 1, 10);
    cfg.eval.max_duration = 2.0;
    cfg.eval.stats_periods = 2.0;
    cfg.eval.window_periods = 1.0;
    const auto dir = make_snapshots(cfg, "afc_orch_eval");
    const auto snap = util::read_file(snapshot_path(dir + "/snapshots", 0));
    // fresh network: zero output layer, so Q is exactly zero
    const auto params = agent::PolicyParams<float>::initialised(255, 8, 1, -0.5);
    const auto r = evaluate_deterministic(params, cfg, fake_baseline(), snap);
    for (std::size_t i = 0; i < r.trace.rows(); ++i) REQUIRE(r.trace.q(i, 0) == 0.0);

    Simulation sim(cfg.sim, cfg.jets);
    sim.load_snapshot(snap);
    std::vector<double> cd;
    const double zero[] = {0.0};
    for (int k = 0; k < 20; ++k) {
        sim.advance(zero, 0.1, [&](const auto&, const flow::ForceRecord& f, auto) { cd.push_back(f.pe[0].cd); });
    }
    REQUIRE(cd.size() == r.trace.rows());
    for (std::size_t i = 0; i < cd.size(); ++i) REQUIRE(std::abs(cd[i] - r.trace.cd(i, 0)) <= 1e-12);
    CHECK_FALSE(r.converged);
    fs::remove_all(dir);
}

TEST_CASE("exports") {
    const auto dir = (fs::temp_directory_path() / "afc_orch_export").string();
    fs::remove_all(dir);
    fs::create_directories(dir + "/baseline");
    Trace t;
    t.n_pe = 2;
    t.data = {0.0, 1.0, 1.1, 0.1, 0.2, 0.0, 0.0, 0.5, 1.2, 1.3, -0.1, 0.123456789012, 0.01, 0.02};
    write_trace(dir, t);
    const auto text = util::read_file(dir + "/cl_cd.csv");
    const std::string s(text.begin(), text.end());
    CHECK(s == "t,Cd_pe0,Cd_pe1,Cl_pe0,Cl_pe1\n0,1,1.1,0.1,0.2\n0.5,1.2,1.3,-0.1,0.123456789\n");

    CHECK_THROWS_AS(export_run(dir), ConfigError);  // no reward.csv yet
    write_rewards(dir + "/reward.csv", {EpisodeStats{}});
    flow::CpProfile cp{{0.0, 180.0}, {1.0, -0.8}};
    write_cp(dir + "/baseline/cp.csv", cp);
    write_spectrum(dir + "/baseline/spectrum.csv", Spectrum{{0.0, 0.1}, {1.0, 2.0}});
    const auto files = export_run(dir);
    CHECK(files.size() == 5);
    for (const auto& f : files) CHECK(fs::file_size(f) > 0);

    BaselineStats b{0.001, 0.25, 0.17, 1.4, 1.1, 0.3, 0.171, 0.169};
    write_baseline_stats(dir + "/stats.csv", b);
    const auto back = read_baseline_stats(dir + "/stats.csv");
    CHECK(back.st == 0.17);
    CHECK(back.mean_cd == 1.4);
    CHECK(back.st_second_half == 0.169);
    fs::remove_all(dir);
}
