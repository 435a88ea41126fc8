#pragma once

#include <span>
#include <vector>

namespace afc::orchestrator {

struct Peak {
    double st = 0.0;
    double power = 0.0;
};

struct Spectrum {
    std::vector<double> st;
    std::vector<double> power;
};

struct SignalStats {
    double mean = 0.0;
    double sigma = 0.0;  ///< population standard deviation
    double st = 0.0;     ///< dominant frequency in D / U_inf units; 0 without a peak
    bool has_peak = false;
    /// Spectral local maxima above the noise floor, strongest first.
    std::vector<Peak> peaks;
};

/// One-sided power spectrum of the Hann-windowed, mean-removed series.
Spectrum power_spectrum(std::span<const double> series, double dt);

/// Mean, sigma and dominant frequency (parabolic interpolation of the log
/// power around the highest bin). A peak counts when it exceeds
/// `peak_ratio` times the median spectral power. Throws ConfigError when
/// the series spans fewer than `min_periods` periods of `expected_st`.
SignalStats signal_statistics(std::span<const double> series, double dt, double expected_st = 0.17,
                              double min_periods = 8.0, double peak_ratio = 50.0);

/// Linear interpolation of (t, y) onto t0, t0 + dt, ... up to t.back().
std::vector<double> resample(std::span<const double> t, std::span<const double> y, double dt);

}  // namespace afc::orchestrator
