#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "edgenilm/acquisition.hpp"

namespace edgenilm {

struct StageTiming {
    std::string stage;
    double median_ns = 0.0;      // per frame
    std::size_t table_bytes = 0;  // analytic, 0 for table-free stages
};

/// Host-time analogue of the per-frame feature-extraction cost table.
struct BenchReport {
    double fs = 0.0;
    std::size_t frame_samples = 0;
    std::size_t fft_size = 0;
    std::size_t reps = 0;
    std::vector<StageTiming> stages;  // raw_conv_vi, raw_conv_i, P, S, fft, fft_skip_reorder
    std::size_t dtw_table_bytes = 0;    // full 128 x 128 table
    std::size_t dtw_rolling_bytes = 0;  // two rows of 128

    const StageTiming& stage(const std::string& name) const;
    /// skip / full median time.
    double time_ratio() const;
    /// 1 - skip / full table memory.
    double memory_saving() const;
};

/// Times each stage on one synthetic frame with `reps` repetitions (each rep
/// a batch of calls). FFT and skip-reorder timings are interleaved so drift
/// affects both alike.
BenchReport run_bench(const AcquisitionConfig& cfg, std::size_t reps = 10000);

std::string bench_to_json(const BenchReport& r);
std::string bench_table(const BenchReport& r);

}  // namespace edgenilm
