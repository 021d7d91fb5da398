#pragma once

#include <array>
#include <span>
#include <vector>

#include "edgenilm/acquisition.hpp"
#include "edgenilm/fft.hpp"

namespace edgenilm {

/// Resampled points per mains cycle; also the DTW snippet length.
inline constexpr std::size_t kCyclePoints = 128;
/// Mains cycles per harmonic analysis window.
inline constexpr std::size_t kWindowCycles = 4;
/// FFT size of one analysis window (4 cycles x 128 points).
inline constexpr std::size_t kWindowPoints = kCyclePoints * kWindowCycles;
/// Odd orders 1, 3, ..., 15.
inline constexpr std::size_t kHarmonicCount = 8;
inline constexpr std::array<int, kHarmonicCount> kOddOrders{1, 3, 5, 7, 9, 11, 13, 15};

struct PowerFeatures {
    double p = 0.0;  // W
    double s = 0.0;  // VA
    double q = 0.0;  // var
    double vrms = 0.0;
    double irms = 0.0;
    bool has_power = true;  // false in current-only mode
};

struct HarmonicVector {
    double f0 = 50.0;
    std::vector<int> orders;
    std::vector<double> magnitudes;  // peak amps
    std::vector<double> phases;      // rad, phase_h - h * phase_1, wrapped to (-pi, pi]
};

double rms(std::span<const double> x);

/// Mean instantaneous power (1/N) sum v[k] i[k].
double active_power(std::span<const double> v, std::span<const double> i);
double active_power(const CalibratedFrame& frame);

/// rms(v) * rms(i).
double apparent_power(std::span<const double> v, std::span<const double> i);
double apparent_power(const CalibratedFrame& frame);

/// sqrt(max(s^2 - p^2, 0)). Throws InconsistencyError when |p| exceeds s by
/// more than 1e-6 * s.
double reactive_power(double p, double s);

/// Time-domain features of a frame; only irms is filled without voltage.
PowerFeatures power_features(std::span<const double> v, std::span<const double> i);
PowerFeatures power_features(const CalibratedFrame& frame);

/// FFT bins holding odd orders 1..15 for a window of `cycles` mains periods.
std::vector<std::size_t> odd_harmonic_bins(std::size_t cycles_in_window);

/// Harmonic magnitudes 2|X[h*c]|/n for a window spanning c whole cycles.
/// Throws ConfigError when f0 does not fall on an exact bin.
HarmonicVector odd_harmonics(const Spectrum& spectrum, double f0 = 50.0);

/// Same, from a skip-reorder readout of odd_harmonic_bins(cycles_in_window).
HarmonicVector odd_harmonics(std::span<const BinValue> bins, std::size_t n,
                             std::size_t cycles_in_window, double f0 = 50.0);

/// Harmonics of a synchronously resampled 4-cycle window (512 points).
/// The skip-reorder path is used unless `use_full_fft` is set.
HarmonicVector window_harmonics(std::span<const double> window, double f0 = 50.0,
                                bool use_full_fft = false);

}  // namespace edgenilm
