#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "edgenilm/acquisition.hpp"
#include "edgenilm/cycles.hpp"
#include "edgenilm/dtw.hpp"
#include "edgenilm/features.hpp"

namespace edgenilm {

enum class Direction { on, off };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct DetectorConfig {
    double threshold = 5.0;  // W in power mode, A rms in current mode
    Mode mode = Mode::power;
    std::size_t refractory = 25;  // cycles
    std::size_t debounce = 3;     // cycles the new level must hold

    void validate() const;
    /// 5 W, or the same sensitivity as rms current at 230 V (about 22 mA).
    static DetectorConfig defaults(Mode mode);
};

/// A switching event. `j` is the last whole cycle before the switch, so the
/// first cycle drawing the new load is j + 1.
struct EventMark {
    std::size_t j = 0;
    Direction direction = Direction::on;
    double delta = 0.0;
};

/// Threshold on the cycle-to-cycle step of `levels` (per-cycle P or Irms),
/// confirmed when the old level held and the new level holds for `debounce`
/// cycles each; candidates
/// within `refractory` cycles of a cluster's first candidate collapse onto
/// the one with the largest step.
std::vector<EventMark> detect_events(std::span<const double> levels, const DetectorConfig& cfg);

inline constexpr std::array<int, 6> kCycleOffsets{-20, -10, 0, 1, 10, 20};
inline constexpr std::size_t kEventMargin = 20;

/// Six single-cycle current snippets around an event, one per entry of
/// kCycleOffsets, each kCyclePoints long.
struct CycleSet {
    std::size_t j = 0;
    std::array<std::vector<double>, 6> cycles;

    /// k = 0, 1, 2 -> cycles j, j-10, j-20.
    std::span<const double> pre(std::size_t k) const { return cycles.at(2 - k); }
    /// k = 0, 1, 2 -> cycles j+1, j+10, j+20.
    std::span<const double> post(std::size_t k) const { return cycles.at(3 + k); }
};

/// Throws WindowError unless 20 cycles exist on both sides of j.
CycleSet extract_cycles(const CycleTable& table, const EventMark& mark);

/// Current-only convenience: slices `current` on the nominal mains grid.
CycleSet extract_cycles(std::span<const double> current, double fs, const EventMark& mark,
                        double f0 = 50.0);

inline constexpr std::size_t kPowerFeatureSize = 20;
inline constexpr std::size_t kCurrentFeatureSize = 17;

/// Composite feature F, post-minus-pre deltas followed by the DTW signature.
///
/// power:   dP, dS, dQ, d|I_h| for h = 1,3,...,15, signature (20 values)
/// current: dIrms, d|I_h| for h = 3,...,15, signature (17 values)
struct FeatureVector {
    std::vector<double> values;
    EventMark mark;
    Mode mode = Mode::power;
};

std::size_t feature_size(Mode mode);

FeatureVector composite_feature(const PowerFeatures& pre_power, const PowerFeatures& post_power,
                                const HarmonicVector& pre_harmonics,
                                const HarmonicVector& post_harmonics, const DtwSignature& sig,
                                Mode mode, const EventMark& mark = {});

/// Everything the classifiers need about one detected event.
struct EventRecord {
    EventMark mark;
    CycleSet cycles;
    PowerFeatures pre_power, post_power;
    HarmonicVector pre_harmonics, post_harmonics;
    DtwSignature signature{};
    FeatureVector feature;
    /// Steady-state current cycle of the switched load: mean post window
    /// minus mean pre window for an on event, the reverse for an off event.
    std::vector<double> load_cycle;
};

/// First cycle of the 4-cycle pre window (ends at j) and post window (ends at j+20).
std::size_t pre_window_start(const EventMark& mark);
std::size_t post_window_start(const EventMark& mark);

EventRecord analyze_event(const CycleTable& table, const EventMark& mark, Mode mode,
                          const DtwOptions& dtw = {}, double f0 = 50.0);

}  // namespace edgenilm
