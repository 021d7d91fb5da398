#include "edgenilm/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "edgenilm/error.hpp"

namespace edgenilm {

namespace {

void check_pair(std::span<const double> v, std::span<const double> i) {
    if (v.empty() || i.empty()) throw DomainError("power features need a non-empty frame");
    if (v.size() != i.size()) throw DomainError("voltage and current lengths differ");
}

double wrap_phase(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

// Magnitude below which a bin is treated as empty and its phase as 0.
constexpr double kPhaseFloor = 1e-12;

HarmonicVector from_bins(std::span<const Complex> at_orders, std::size_t n, double f0) {
    HarmonicVector h;
    h.f0 = f0;
    const double scale = 2.0 / static_cast<double>(n);
    const double fundamental_phase =
        std::abs(at_orders[0]) * scale > kPhaseFloor ? std::arg(at_orders[0]) : 0.0;
    for (std::size_t k = 0; k < kHarmonicCount; ++k) {
        const double mag = std::abs(at_orders[k]) * scale;
        h.orders.push_back(kOddOrders[k]);
        h.magnitudes.push_back(mag);
        h.phases.push_back(mag > kPhaseFloor
                               ? wrap_phase(std::arg(at_orders[k]) - kOddOrders[k] * fundamental_phase)
                               : 0.0);
    }
    h.phases[0] = 0.0;
    return h;
}

}  // namespace

double rms(std::span<const double> x) {
    if (x.empty()) throw DomainError("rms of an empty series");
    double acc = 0.0;
    for (const double s : x) acc += s * s;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double active_power(std::span<const double> v, std::span<const double> i) {
    check_pair(v, i);
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) acc += v[k] * i[k];
    return acc / static_cast<double>(v.size());
}

double active_power(const CalibratedFrame& frame) {
    if (!frame.has_voltage()) throw DomainError("active power needs the voltage channel");
    return active_power(frame.v, frame.i);
}

double apparent_power(std::span<const double> v, std::span<const double> i) {
    check_pair(v, i);
    return rms(v) * rms(i);
}

double apparent_power(const CalibratedFrame& frame) {
    if (!frame.has_voltage()) throw DomainError("apparent power needs the voltage channel");
    return apparent_power(frame.v, frame.i);
}

double reactive_power(double p, double s) {
    if (s < 0.0) throw DomainError("apparent power must be non-negative");
    if (std::abs(p) > s + 1e-6 * s) {
        throw InconsistencyError("|P| = " + std::to_string(std::abs(p)) +
                                 " exceeds S = " + std::to_string(s));
    }
    return std::sqrt(std::max(s * s - p * p, 0.0));
}

PowerFeatures power_features(std::span<const double> v, std::span<const double> i) {
    PowerFeatures f;
    f.irms = rms(i);
    if (v.empty()) {
        f.has_power = false;
        return f;
    }
    check_pair(v, i);
    // Extended sums: S^2 - P^2 cancels badly near unity power factor.
    long double vv = 0.0L, ii = 0.0L, vi = 0.0L;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const long double a = v[k], b = i[k];
        vv += a * a;
        ii += b * b;
        vi += a * b;
    }
    const auto n = static_cast<long double>(v.size());
    f.vrms = static_cast<double>(std::sqrt(vv / n));
    f.p = static_cast<double>(vi / n);
    f.s = f.vrms * f.irms;
    reactive_power(f.p, f.s);
    f.q = static_cast<double>(std::sqrt(std::max(vv * ii - vi * vi, 0.0L)) / n);
    return f;
}

PowerFeatures power_features(const CalibratedFrame& frame) {
    return power_features(frame.v, frame.i);
}

std::vector<std::size_t> odd_harmonic_bins(std::size_t cycles_in_window) {
    std::vector<std::size_t> bins;
    for (const int h : kOddOrders) bins.push_back(static_cast<std::size_t>(h) * cycles_in_window);
    return bins;
}

HarmonicVector odd_harmonics(const Spectrum& spectrum, double f0) {
    if (!(spectrum.fs > 0.0)) throw ConfigError("spectrum has no sample rate");
    const double cycles = f0 * static_cast<double>(spectrum.n) / spectrum.fs;
    const double whole = std::round(cycles);
    if (whole < 1.0 || std::abs(cycles - whole) > 1e-9) {
        throw ConfigError("fundamental " + std::to_string(f0) + " Hz is not bin-aligned (" +
                          std::to_string(cycles) + " cycles in window)");
    }
    const auto bins = odd_harmonic_bins(static_cast<std::size_t>(whole));
    if (bins.back() >= spectrum.bins.size()) {
        throw ConfigError("15th harmonic lies above Nyquist for this window");
    }
    std::vector<Complex> at;
    for (const auto b : bins) at.push_back(spectrum.bins[b]);
    return from_bins(at, spectrum.n, f0);
}

HarmonicVector odd_harmonics(std::span<const BinValue> bins, std::size_t n,
                             std::size_t cycles_in_window, double f0) {
    const auto expected = odd_harmonic_bins(cycles_in_window);
    if (bins.size() != expected.size()) throw ConfigError("expected one bin per odd order");
    std::vector<Complex> at;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        if (bins[k].bin != expected[k]) {
            throw ConfigError("bin " + std::to_string(bins[k].bin) + " is not odd order " +
                              std::to_string(kOddOrders[k]));
        }
        at.push_back(bins[k].value);
    }
    return from_bins(at, n, f0);
}

HarmonicVector window_harmonics(std::span<const double> window, double f0, bool use_full_fft) {
    static const FftPlan full(kWindowPoints, Reorder::table);
    static const FftPlan skip(kWindowPoints, Reorder::skip);
    static const auto wanted = odd_harmonic_bins(kWindowCycles);
    if (use_full_fft) {
        const double fs = f0 * static_cast<double>(kCyclePoints);
        return odd_harmonics(full.transform(window, fs), f0);
    }
    const auto bins = skip.transform_bins(window, wanted);
    return odd_harmonics(bins, kWindowPoints, kWindowCycles, f0);
}

}  // namespace edgenilm
