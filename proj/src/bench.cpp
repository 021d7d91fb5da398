#include "edgenilm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "edgenilm/dtw.hpp"
#include "edgenilm/error.hpp"
#include "edgenilm/features.hpp"
#include "edgenilm/fft.hpp"

namespace edgenilm {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kBatch = 8;

// Keeps results observable so the optimizer cannot drop the timed work.
volatile double g_sink = 0.0;

template <typename F>
double time_batch(F&& f) {
    const auto t0 = Clock::now();
    for (std::size_t b = 0; b < kBatch; ++b) f();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::nano>(t1 - t0).count() / kBatch;
}

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    return (*std::max_element(v.begin(), mid) + hi) / 2.0;
}

}  // namespace

const StageTiming& BenchReport::stage(const std::string& name) const {
    for (const auto& s : stages) {
        if (s.stage == name) return s;
    }
    throw DomainError("no bench stage named '" + name + "'");
}

double BenchReport::time_ratio() const {
    return stage("fft_skip_reorder").median_ns / stage("fft").median_ns;
}

double BenchReport::memory_saving() const {
    return 1.0 - static_cast<double>(stage("fft_skip_reorder").table_bytes) /
                     static_cast<double>(stage("fft").table_bytes);
}

BenchReport run_bench(const AcquisitionConfig& cfg, std::size_t reps) {
    cfg.validate();
    if (reps == 0) throw ConfigError("bench needs at least one repetition");
    BenchReport r;
    r.fs = sampling_rate(cfg);
    r.frame_samples = frame_length(r.fs, cfg);
    r.fft_size = kWindowPoints;
    r.reps = reps;

    const std::size_t n = std::max(r.frame_samples, kWindowPoints);
    RawFrame dual, single;
    dual.fs = single.fs = r.fs;
    std::vector<double> v(n), i(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double th = 2.0 * std::numbers::pi * 50.0 * static_cast<double>(k) / r.fs;
        v[k] = 325.0 * std::sin(th);
        i[k] = 5.0 * std::sin(th - 0.4) + 1.5 * std::sin(3.0 * th);
        const auto code = [&](double x, double fs_units) {
            return static_cast<std::int32_t>(std::lround(x / fs_units * 2048.0 + 2048.0));
        };
        dual.counts_v.push_back(code(v[k], cfg.full_scale_v));
        dual.counts_i.push_back(code(i[k], cfg.full_scale_i));
    }
    dual.counts_v.resize(r.frame_samples);
    dual.counts_i.resize(r.frame_samples);
    single.counts_i = dual.counts_i;
    const std::span<const double> fv(v.data(), r.frame_samples), fi(i.data(), r.frame_samples);
    const std::span<const double> window(i.data(), kWindowPoints);

    const FftPlan full(kWindowPoints, Reorder::table);
    const FftPlan skip(kWindowPoints, Reorder::skip);
    const auto bins = odd_harmonic_bins(kWindowCycles);

    std::vector<double> t_vi, t_i, t_p, t_s, t_full, t_skip;
    for (auto* vec : {&t_vi, &t_i, &t_p, &t_s, &t_full, &t_skip}) vec->reserve(reps);

    for (std::size_t rep = 0; rep < reps; ++rep) {
        t_vi.push_back(time_batch([&] { g_sink = g_sink + raw_conv(dual, cfg).v.back(); }));
        t_i.push_back(time_batch([&] { g_sink = g_sink + raw_conv(single, cfg).i.back(); }));
        t_p.push_back(time_batch([&] { g_sink = g_sink + active_power(fv, fi); }));
        t_s.push_back(time_batch([&] { g_sink = g_sink + apparent_power(fv, fi); }));
        auto run_full = [&] {
            const auto s = full.transform(window);
            double acc = 0.0;
            for (const auto k : bins) acc += std::abs(s.bins[k]) + std::arg(s.bins[k]);
            g_sink = g_sink + acc;
        };
        auto run_skip = [&] {
            const auto out = skip.transform_bins(window, bins);
            double acc = 0.0;
            for (const auto& b : out) acc += b.magnitude + b.phase;
            g_sink = g_sink + acc;
        };
        // Alternate which of the pair goes first.
        if (rep % 2 == 0) {
            t_full.push_back(time_batch(run_full));
            t_skip.push_back(time_batch(run_skip));
        } else {
            t_skip.push_back(time_batch(run_skip));
            t_full.push_back(time_batch(run_full));
        }
    }

    r.stages = {
        {"raw_conv_vi", median(t_vi), 0},
        {"raw_conv_i", median(t_i), 0},
        {"P", median(t_p), 0},
        {"S", median(t_s), 0},
        {"fft", median(t_full), full.table_bytes()},
        {"fft_skip_reorder", median(t_skip), skip.table_bytes()},
    };
    r.dtw_table_bytes = dtw_table_bytes(kCyclePoints, kCyclePoints);
    r.dtw_rolling_bytes = dtw_rolling_bytes(kCyclePoints);
    return r;
}

std::string bench_to_json(const BenchReport& r) {
    nlohmann::ordered_json j;
    j["fs_hz"] = r.fs;
    j["frame_samples"] = r.frame_samples;
    j["fft_size"] = r.fft_size;
    j["reps"] = r.reps;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& s : r.stages) {
        nlohmann::ordered_json e;
        e["stage"] = s.stage;
        e["median_ns_per_frame"] = s.median_ns;
        e["table_bytes"] = s.table_bytes;
        stages.push_back(e);
    }
    j["stages"] = stages;
    j["dtw_table_bytes"] = r.dtw_table_bytes;
    j["dtw_rolling_bytes"] = r.dtw_rolling_bytes;
    j["skip_vs_fft_time_ratio"] = r.time_ratio();
    j["skip_time_reduction_pct"] = 100.0 * (1.0 - r.time_ratio());
    j["skip_table_memory_reduction_pct"] = 100.0 * r.memory_saving();
    return j.dump(2) + "\n";
}

std::string bench_table(const BenchReport& r) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "frame: %zu samples at %.1f Hz, FFT %zu points, %zu reps\n",
                  r.frame_samples, r.fs, r.fft_size, r.reps);
    out += line;
    std::snprintf(line, sizeof line, "%-18s %14s %12s\n", "stage", "median ns", "table B");
    out += line;
    for (const auto& s : r.stages) {
        std::snprintf(line, sizeof line, "%-18s %14.1f %12zu\n", s.stage.c_str(), s.median_ns,
                      s.table_bytes);
        out += line;
    }
    std::snprintf(line, sizeof line,
                  "skip-reorder: time %.1f%% lower (ratio %.3f), table memory %.1f%% lower\n",
                  100.0 * (1.0 - r.time_ratio()), r.time_ratio(), 100.0 * r.memory_saving());
    out += line;
    std::snprintf(line, sizeof line, "DTW buffers: full table %zu B, rolling rows %zu B\n",
                  r.dtw_table_bytes, r.dtw_rolling_bytes);
    out += line;
    return out;
}

}  // namespace edgenilm
