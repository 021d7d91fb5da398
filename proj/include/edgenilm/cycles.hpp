#pragma once

#include <span>
#include <vector>

#include "edgenilm/acquisition.hpp"
#include "edgenilm/features.hpp"

namespace edgenilm {

/// Start position (fractional sample index) of every whole mains cycle.
struct CycleGrid {
    std::vector<double> starts;
    double period = 0.0;  // nominal samples per cycle

    std::size_t size() const { return starts.size(); }
    double end(std::size_t c) const {
        return c + 1 < starts.size() ? starts[c + 1] : starts[c] + period;
    }
};

/// Rising zero crossings of `reference`, linearly interpolated. A small
/// hysteresis (5 % of the peak) rejects chatter; the grid is extended
/// backwards and gaps are filled with the nominal period so cycle c always
/// starts near c periods after the first grid point.
std::vector<double> rising_zero_crossings(std::span<const double> reference);
CycleGrid detect_cycle_grid(std::span<const double> reference, double fs, double f0);

/// Fixed grid from sample 0; used in current-only mode.
CycleGrid nominal_cycle_grid(std::size_t samples, double fs, double f0);

/// Linear-interpolation resampling of x over [t0, t1) into `points` values.
std::vector<double> resample_segment(std::span<const double> x, double t0, double t1,
                                     std::size_t points);

/// Every complete cycle of a record resampled to kCyclePoints samples.
class CycleTable {
public:
    CycleTable() = default;

    /// Power mode slices on voltage zero crossings; current-only mode uses
    /// the nominal mains grid.
    static CycleTable build(const CalibratedFrame& signal, double f0);

    std::size_t size() const { return count_; }
    bool has_voltage() const { return !v_.empty(); }
    std::span<const double> current(std::size_t c) const;
    std::span<const double> voltage(std::size_t c) const;
    /// `cycles` consecutive cycles starting at c, concatenated.
    std::span<const double> current_run(std::size_t c, std::size_t cycles) const;
    std::span<const double> voltage_run(std::size_t c, std::size_t cycles) const;
    double start_sample(std::size_t c) const { return grid_.starts.at(c); }

    /// Per-cycle active power, or per-cycle rms current without voltage.
    std::vector<double> level_series() const;
    std::vector<double> power_series() const;
    std::vector<double> irms_series() const;

private:
    std::size_t count_ = 0;
    CycleGrid grid_;
    std::vector<double> v_;
    std::vector<double> i_;
};

}  // namespace edgenilm
