#include "edgenilm/cycles.hpp"

#include <algorithm>
#include <cmath>

#include "edgenilm/error.hpp"

namespace edgenilm {

std::vector<double> rising_zero_crossings(std::span<const double> reference) {
    std::vector<double> crossings;
    double peak = 0.0;
    for (const double x : reference) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) return crossings;
    const double hysteresis = 0.05 * peak;

    bool armed = false;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        if (reference[k] < -hysteresis) armed = true;
        if (k == 0 || !armed) continue;
        const double a = reference[k - 1];
        const double b = reference[k];
        if (a < 0.0 && b >= 0.0) {
            crossings.push_back(static_cast<double>(k - 1) + (-a) / (b - a));
            armed = false;
        }
    }
    return crossings;
}

namespace {

bool cycle_fits(double start, double end, std::size_t samples) {
    const double last = start + (end - start) * static_cast<double>(kCyclePoints - 1) /
                                    static_cast<double>(kCyclePoints);
    return start >= 0.0 && last <= static_cast<double>(samples) - 1.0 + 1e-9;
}

// Keeps only grid points whose cycle lies fully inside the record.
void trim_grid(CycleGrid& grid, std::size_t samples) {
    std::size_t keep = 0;
    while (keep < grid.starts.size() && cycle_fits(grid.starts[keep], grid.end(keep), samples)) {
        ++keep;
    }
    grid.starts.resize(keep);
}

}  // namespace

CycleGrid nominal_cycle_grid(std::size_t samples, double fs, double f0) {
    if (!(fs > 0.0) || !(f0 > 0.0)) throw ConfigError("sample rate and mains frequency must be positive");
    CycleGrid grid;
    grid.period = fs / f0;
    for (double s = 0.0; s + grid.period <= static_cast<double>(samples) + 1e-9; s += grid.period) {
        grid.starts.push_back(s);
    }
    trim_grid(grid, samples);
    return grid;
}

CycleGrid detect_cycle_grid(std::span<const double> reference, double fs, double f0) {
    const auto crossings = rising_zero_crossings(reference);
    if (crossings.empty()) return nominal_cycle_grid(reference.size(), fs, f0);

    CycleGrid grid;
    grid.period = fs / f0;
    const double p = grid.period;

    std::vector<double> before;
    for (double s = crossings.front() - p; s >= -1e-6; s -= p) before.push_back(std::max(0.0, s));
    grid.starts.assign(before.rbegin(), before.rend());

    for (const double c : crossings) {
        if (!grid.starts.empty()) {
            if (c - grid.starts.back() < 0.5 * p) continue;
            while (c - grid.starts.back() > 1.5 * p) grid.starts.push_back(grid.starts.back() + p);
        }
        grid.starts.push_back(c);
    }
    const double limit = static_cast<double>(reference.size());
    while (grid.starts.back() + 2.0 * p <= limit + 1e-9) grid.starts.push_back(grid.starts.back() + p);

    trim_grid(grid, reference.size());
    return grid;
}

std::vector<double> resample_segment(std::span<const double> x, double t0, double t1,
                                     std::size_t points) {
    if (x.empty()) throw DomainError("cannot resample an empty series");
    std::vector<double> out(points);
    const double step = (t1 - t0) / static_cast<double>(points);
    const std::size_t last = x.size() - 1;
    for (std::size_t m = 0; m < points; ++m) {
        const double pos = t0 + step * static_cast<double>(m);
        const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
        if (idx >= last) {
            out[m] = x[last];
            continue;
        }
        const double frac = pos - static_cast<double>(idx);
        out[m] = x[idx] * (1.0 - frac) + x[idx + 1] * frac;
    }
    return out;
}

CycleTable CycleTable::build(const CalibratedFrame& signal, double f0) {
    CycleTable t;
    t.grid_ = signal.has_voltage() ? detect_cycle_grid(signal.v, signal.fs, f0)
                                   : nominal_cycle_grid(signal.size(), signal.fs, f0);
    t.count_ = t.grid_.size();
    t.i_.reserve(t.count_ * kCyclePoints);
    if (signal.has_voltage()) t.v_.reserve(t.count_ * kCyclePoints);
    for (std::size_t c = 0; c < t.count_; ++c) {
        const double a = t.grid_.starts[c];
        const double b = t.grid_.end(c);
        const auto ci = resample_segment(signal.i, a, b, kCyclePoints);
        t.i_.insert(t.i_.end(), ci.begin(), ci.end());
        if (signal.has_voltage()) {
            const auto cv = resample_segment(signal.v, a, b, kCyclePoints);
            t.v_.insert(t.v_.end(), cv.begin(), cv.end());
        }
    }
    return t;
}

std::span<const double> CycleTable::current_run(std::size_t c, std::size_t cycles) const {
    if (c + cycles > count_) throw WindowError("cycle run outside the record");
    return std::span<const double>(i_).subspan(c * kCyclePoints, cycles * kCyclePoints);
}

std::span<const double> CycleTable::voltage_run(std::size_t c, std::size_t cycles) const {
    if (!has_voltage()) return {};
    if (c + cycles > count_) throw WindowError("cycle run outside the record");
    return std::span<const double>(v_).subspan(c * kCyclePoints, cycles * kCyclePoints);
}

std::span<const double> CycleTable::current(std::size_t c) const { return current_run(c, 1); }
std::span<const double> CycleTable::voltage(std::size_t c) const { return voltage_run(c, 1); }

std::vector<double> CycleTable::power_series() const {
    if (!has_voltage()) throw DomainError("power series needs the voltage channel");
    std::vector<double> out(count_);
    for (std::size_t c = 0; c < count_; ++c) out[c] = active_power(voltage(c), current(c));
    return out;
}

std::vector<double> CycleTable::irms_series() const {
    std::vector<double> out(count_);
    for (std::size_t c = 0; c < count_; ++c) out[c] = rms(current(c));
    return out;
}

std::vector<double> CycleTable::level_series() const {
    return has_voltage() ? power_series() : irms_series();
}

}  // namespace edgenilm
