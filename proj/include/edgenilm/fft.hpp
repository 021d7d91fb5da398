#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgenilm {

using Complex = std::complex<double>;

/// One-sided spectrum of a real input: bins 0..n/2.
struct Spectrum {
    std::size_t n = 0;
    double fs = 0.0;
    std::vector<Complex> bins;
};

/// A single bin read out of a transform without output reordering.
struct BinValue {
    std::size_t bin = 0;
    Complex value;
    double magnitude = 0.0;
    double phase = 0.0;
};

enum class Reorder {
    table,  // bit-reversal permutation pass driven by a lookup table
    skip,   // no permutation; bins are read through index translation
};

bool is_power_of_two(std::size_t n);
std::size_t bit_reverse(std::size_t index, unsigned bits);

/// Precomputed tables for an iterative radix-2 decimation-in-frequency FFT.
///
/// The butterflies take natural-order input and leave the output in
/// bit-reversed order. transform() finishes with the permutation pass;
/// transform_bins() skips it and reads each wanted bin at its bit-reversed
/// position, so both paths produce bit-identical values. A plan built with
/// Reorder::skip never allocates the permutation table. Plans are immutable
/// after construction and may be shared between threads.
class FftPlan {
public:
    explicit FftPlan(std::size_t n, Reorder reorder = Reorder::table);

    std::size_t size() const { return n_; }
    Reorder reorder() const { return reorder_; }

    /// Full transform of the first n samples. Requires a Reorder::table plan.
    Spectrum transform(std::span<const double> x, double fs = 0.0) const;

    /// Selected bins only, without the reordering pass.
    std::vector<BinValue> transform_bins(std::span<const double> x,
                                         std::span<const std::size_t> wanted) const;

    std::size_t twiddle_bytes() const;
    std::size_t bitrev_bytes() const;
    std::size_t table_bytes() const { return twiddle_bytes() + bitrev_bytes(); }

private:
    void butterflies(std::span<const double> x, std::vector<double>& re,
                     std::vector<double>& im) const;

    std::size_t n_;
    unsigned bits_;
    Reorder reorder_;
    std::vector<double> tw_re_;
    std::vector<double> tw_im_;
    std::vector<std::uint32_t> bitrev_;
};

/// Forward DFT X[k] = sum_j x[j] exp(-2 pi i j k / n), bins 0..n/2.
Spectrum fft(std::span<const double> x, std::size_t n, double fs = 0.0);

std::vector<BinValue> fft_skip_reorder(std::span<const double> x, std::size_t n,
                                       std::span<const std::size_t> wanted_bins);

}  // namespace edgenilm
