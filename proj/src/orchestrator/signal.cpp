#include "afc/orchestrator/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "afc/errors.hpp"
#include "afc/flow/poisson.hpp"

namespace afc::orchestrator {

Spectrum power_spectrum(std::span<const double> series, double dt) {
    const std::size_t n = series.size();
    if (n < 4) throw ConfigError("spectrum needs at least 4 samples");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> in(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        in[i] = (series[i] - mean) * w;
        wsum += w * w;
    }
    const std::size_t m = n / 2 + 1;
    std::vector<fftw_complex> out(m);
    fftw_plan plan;
    {
        std::lock_guard lock(flow::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(flow::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    Spectrum s;
    s.st.resize(m);
    s.power.resize(m);
    const double scale = 2.0 * dt / wsum;
    for (std::size_t k = 0; k < m; ++k) {
        s.st[k] = static_cast<double>(k) / (static_cast<double>(n) * dt);
        s.power[k] = scale * (out[k][0] * out[k][0] + out[k][1] * out[k][1]);
    }
    return s;
}

SignalStats signal_statistics(std::span<const double> series, double dt, double expected_st, double min_periods,
                              double peak_ratio) {
    const std::size_t n = series.size();
    if (!(dt > 0.0) || static_cast<double>(n) * dt * expected_st < min_periods) {
        throw ConfigError("series too short for spectral statistics");
    }
    SignalStats out;
    out.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double x : series) var += (x - out.mean) * (x - out.mean);
    out.sigma = std::sqrt(var / static_cast<double>(n));

    const Spectrum s = power_spectrum(series, dt);
    const std::size_t m = s.power.size();
    std::vector<double> sorted(s.power.begin() + 1, s.power.end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double floor = sorted[sorted.size() / 2];
    const double total = std::accumulate(s.power.begin(), s.power.end(), 0.0);
    if (!(total > 0.0)) return out;

    const double bin = 1.0 / (static_cast<double>(n) * dt);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double b = s.power[k];
        if (!(b > s.power[k - 1] && b >= s.power[k + 1] && b > peak_ratio * floor)) continue;
        double delta = 0.0;
        if (s.power[k - 1] > 0.0 && s.power[k + 1] > 0.0) {
            const double la = std::log(s.power[k - 1]), lb = std::log(b), lc = std::log(s.power[k + 1]);
            const double denom = la - 2.0 * lb + lc;
            if (denom < 0.0) delta = 0.5 * (la - lc) / denom;
        }
        out.peaks.push_back({(static_cast<double>(k) + delta) * bin, b});
    }
    std::sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) { return a.power > b.power; });
    if (!out.peaks.empty()) {
        const double strongest = out.peaks.front().power;
        std::erase_if(out.peaks, [&](const Peak& p) { return p.power < 1e-3 * strongest; });
        out.has_peak = true;
        out.st = out.peaks.front().st;
    }
    return out;
}

std::vector<double> resample(std::span<const double> t, std::span<const double> y, double dt) {
    if (t.size() != y.size() || t.size() < 2) throw ConfigError("resample needs matching series of length >= 2");
    std::vector<double> out;
    std::size_t j = 0;
    for (double x = t.front(); x <= t.back() + 1e-12 * std::abs(t.back()); x = t.front() + dt * static_cast<double>(out.size())) {
        while (j + 2 < t.size() && t[j + 1] < x) ++j;
        const double w = std::clamp((x - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
        out.push_back((1.0 - w) * y[j] + w * y[j + 1]);
    }
    return out;
}

}  // namespace afc::orchestrator
