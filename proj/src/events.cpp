#include "edgenilm/events.hpp"

#include <cmath>

#include "edgenilm/error.hpp"

namespace edgenilm {

const char* to_string(Direction d) { return d == Direction::on ? "on" : "off"; }

Direction direction_from_string(const std::string& s) {
    if (s == "on") return Direction::on;
    if (s == "off") return Direction::off;
    throw ConfigError("unknown event direction '" + s + "'");
}

void DetectorConfig::validate() const {
    if (!(threshold > 0.0)) throw ConfigError("detector threshold must be positive");
    if (refractory < 1) throw ConfigError("refractory must be >= 1");
    if (debounce < 1) throw ConfigError("debounce must be >= 1");
}

DetectorConfig DetectorConfig::defaults(Mode mode) {
    DetectorConfig cfg;
    cfg.mode = mode;
    cfg.threshold = mode == Mode::power ? 5.0 : 5.0 / 230.0;
    return cfg;
}

std::vector<EventMark> detect_events(std::span<const double> levels, const DetectorConfig& cfg) {
    cfg.validate();
    std::vector<EventMark> events;
    std::size_t cluster_start = 0;
    bool in_cluster = false;

    for (std::size_t c = 1; c < levels.size(); ++c) {
        const double step = levels[c] - levels[c - 1];
        if (std::abs(step) < cfg.threshold) continue;
        const double sign = step > 0.0 ? 1.0 : -1.0;
        if (c + cfg.debounce > levels.size()) continue;
        // The old level must itself have been steady, or the fall back from
        // a one-cycle spike would read as a step.
        bool steady = true;
        for (std::size_t m = 1; m < cfg.debounce && m < c && steady; ++m) {
            steady = std::abs(levels[c - 1 - m] - levels[c - 1]) < cfg.threshold;
        }
        if (!steady) continue;
        bool holds = true;
        for (std::size_t m = 0; m < cfg.debounce && holds; ++m) {
            holds = (levels[c + m] - levels[c - 1]) * sign >= cfg.threshold;
        }
        if (!holds) continue;

        EventMark mark{c - 1, step > 0.0 ? Direction::on : Direction::off, std::abs(step)};
        if (in_cluster && c - cluster_start < cfg.refractory) {
            if (mark.delta > events.back().delta) events.back() = mark;
            continue;
        }
        events.push_back(mark);
        cluster_start = c;
        in_cluster = true;
    }
    return events;
}

CycleSet extract_cycles(const CycleTable& table, const EventMark& mark) {
    if (mark.j < kEventMargin || mark.j + kEventMargin >= table.size()) {
        throw WindowError("event at cycle " + std::to_string(mark.j) + " needs " +
                          std::to_string(kEventMargin) + " cycles on each side (record has " +
                          std::to_string(table.size()) + ")");
    }
    CycleSet cs;
    cs.j = mark.j;
    for (std::size_t k = 0; k < kCycleOffsets.size(); ++k) {
        const auto c = static_cast<std::size_t>(static_cast<long>(mark.j) + kCycleOffsets[k]);
        const auto snippet = table.current(c);
        cs.cycles[k].assign(snippet.begin(), snippet.end());
    }
    return cs;
}

CycleSet extract_cycles(std::span<const double> current, double fs, const EventMark& mark,
                        double f0) {
    CalibratedFrame signal;
    signal.fs = fs;
    signal.i.assign(current.begin(), current.end());
    return extract_cycles(CycleTable::build(signal, f0), mark);
}

std::size_t feature_size(Mode mode) {
    return mode == Mode::power ? kPowerFeatureSize : kCurrentFeatureSize;
}

FeatureVector composite_feature(const PowerFeatures& pre_power, const PowerFeatures& post_power,
                                const HarmonicVector& pre_harmonics,
                                const HarmonicVector& post_harmonics, const DtwSignature& sig,
                                Mode mode, const EventMark& mark) {
    if (pre_harmonics.magnitudes.size() != kHarmonicCount ||
        post_harmonics.magnitudes.size() != kHarmonicCount) {
        throw FeatureError("harmonic vectors must hold the 8 odd orders 1..15");
    }
    FeatureVector f;
    f.mark = mark;
    f.mode = mode;
    f.values.reserve(feature_size(mode));

    std::size_t first_order = 0;
    if (mode == Mode::power) {
        if (!pre_power.has_power || !post_power.has_power) {
            throw FeatureError("power-mode feature needs voltage-derived P/S/Q");
        }
        f.values.push_back(post_power.p - pre_power.p);
        f.values.push_back(post_power.s - pre_power.s);
        f.values.push_back(post_power.q - pre_power.q);
    } else {
        f.values.push_back(post_power.irms - pre_power.irms);
        first_order = 1;  // the fundamental step is carried by dIrms
    }
    for (std::size_t h = first_order; h < kHarmonicCount; ++h) {
        f.values.push_back(post_harmonics.magnitudes[h] - pre_harmonics.magnitudes[h]);
    }
    f.values.insert(f.values.end(), sig.begin(), sig.end());

    for (const double x : f.values) {
        if (!std::isfinite(x)) throw FeatureError("non-finite value in composite feature");
    }
    return f;
}

std::size_t pre_window_start(const EventMark& mark) { return mark.j + 1 - kWindowCycles; }

std::size_t post_window_start(const EventMark& mark) {
    return mark.j + kEventMargin + 1 - kWindowCycles;
}

EventRecord analyze_event(const CycleTable& table, const EventMark& mark, Mode mode,
                          const DtwOptions& dtw, double f0) {
    EventRecord r;
    r.mark = mark;
    r.cycles = extract_cycles(table, mark);

    const std::size_t pre = pre_window_start(mark);
    const std::size_t post = post_window_start(mark);
    const auto pre_i = table.current_run(pre, kWindowCycles);
    const auto post_i = table.current_run(post, kWindowCycles);
    if (mode == Mode::power) {
        if (!table.has_voltage()) throw FeatureError("power mode needs the voltage channel");
        r.pre_power = power_features(table.voltage_run(pre, kWindowCycles), pre_i);
        r.post_power = power_features(table.voltage_run(post, kWindowCycles), post_i);
    } else {
        r.pre_power = power_features({}, pre_i);
        r.post_power = power_features({}, post_i);
    }
    r.pre_harmonics = window_harmonics(pre_i, f0);
    r.post_harmonics = window_harmonics(post_i, f0);
    r.signature = dtw_signature(r.cycles, dtw);
    r.feature = composite_feature(r.pre_power, r.post_power, r.pre_harmonics, r.post_harmonics,
                                  r.signature, mode, mark);

    const double sign = mark.direction == Direction::on ? 1.0 : -1.0;
    r.load_cycle.assign(kCyclePoints, 0.0);
    for (std::size_t c = 0; c < kWindowCycles; ++c) {
        const auto a = table.current(post + c);
        const auto b = table.current(pre + c);
        for (std::size_t p = 0; p < kCyclePoints; ++p) {
            r.load_cycle[p] += sign * (a[p] - b[p]) / static_cast<double>(kWindowCycles);
        }
    }
    return r;
}

}  // namespace edgenilm
