#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace edgenilm {

enum class LocalCost { absolute, squared };

struct DtwOptions {
    LocalCost cost = LocalCost::absolute;
    /// Sakoe-Chiba half-width in cells along the (rescaled) diagonal; unset = unconstrained.
    std::optional<std::size_t> band;
};

/// Accumulated cost and the optimal warping path. Path indices are 0-based
/// (i into x, j into y), from (0, 0) to (|x|-1, |y|-1).
struct DtwResult {
    double distance = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Full cumulative-cost table D, (|x|) x (|y|), row-major.
struct DtwTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cells;

    double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
    void write_csv(std::ostream& os) const;
};

/// D(i,j) = d(i,j) + min{D(i-1,j), D(i,j-1), D(i-1,j-1)} with D(0,0) = d(0,0)
/// and the first row/column accumulated. Keeps the full table and backtracks;
/// ties prefer the diagonal move, then (i-1, j), then (i, j-1).
DtwResult dtw_distance(std::span<const double> x, std::span<const double> y,
                       const DtwOptions& options = {});

/// Distance only, with a two-row rolling buffer.
double dtw_cost(std::span<const double> x, std::span<const double> y,
                const DtwOptions& options = {});

DtwTable dtw_table(std::span<const double> x, std::span<const double> y,
                   const DtwOptions& options = {});

/// Bytes held by the DP buffers for sequences of the given lengths.
std::size_t dtw_table_bytes(std::size_t n, std::size_t m);
std::size_t dtw_rolling_bytes(std::size_t m);

inline constexpr std::size_t kSignatureSize = 9;
using DtwSignature = std::array<double, kSignatureSize>;

struct CycleSet;  // events.hpp

/// Distances of each post-event cycle (j+1, j+10, j+20) against each
/// pre-event cycle (j, j-10, j-20), post-major.
DtwSignature dtw_signature(const CycleSet& cycles, const DtwOptions& options = {});

}  // namespace edgenilm
