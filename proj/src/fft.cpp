#include "edgenilm/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edgenilm/error.hpp"

namespace edgenilm {

bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

std::size_t bit_reverse(std::size_t index, unsigned bits) {
    std::size_t r = 0;
    for (unsigned b = 0; b < bits; ++b) {
        r = (r << 1) | (index & 1u);
        index >>= 1;
    }
    return r;
}

FftPlan::FftPlan(std::size_t n, Reorder reorder) : n_(n), bits_(0), reorder_(reorder) {
    if (n < 2 || !is_power_of_two(n)) {
        throw ConfigError("FFT size must be a power of two >= 2, got " + std::to_string(n));
    }
    while ((std::size_t{1} << bits_) < n) ++bits_;

    tw_re_.resize(n / 2);
    tw_im_.resize(n / 2);
    for (std::size_t m = 0; m < n / 2; ++m) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        tw_re_[m] = std::cos(angle);
        tw_im_[m] = std::sin(angle);
    }
    if (reorder_ == Reorder::table) {
        bitrev_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            bitrev_[k] = static_cast<std::uint32_t>(bit_reverse(k, bits_));
        }
    }
}

void FftPlan::butterflies(std::span<const double> x, std::vector<double>& re,
                          std::vector<double>& im) const {
    if (x.size() < n_) {
        throw DomainError("FFT input has " + std::to_string(x.size()) + " samples, need " +
                          std::to_string(n_));
    }
    re.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_));
    im.assign(n_, 0.0);

    for (std::size_t len = n_; len >= 2; len >>= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::size_t a = start + k;
                const std::size_t b = a + half;
                const double ar = re[a], ai = im[a];
                const double br = re[b], bi = im[b];
                re[a] = ar + br;
                im[a] = ai + bi;
                const double dr = ar - br, di = ai - bi;
                const double wr = tw_re_[k * step], wi = tw_im_[k * step];
                re[b] = dr * wr - di * wi;
                im[b] = dr * wi + di * wr;
            }
        }
    }
}

Spectrum FftPlan::transform(std::span<const double> x, double fs) const {
    if (reorder_ != Reorder::table) {
        throw ConfigError("full transform needs a plan with a bit-reversal table");
    }
    std::vector<double> re, im;
    butterflies(x, re, im);
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t r = bitrev_[k];
        if (k < r) {
            std::swap(re[k], re[r]);
            std::swap(im[k], im[r]);
        }
    }
    Spectrum s;
    s.n = n_;
    s.fs = fs;
    s.bins.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) s.bins[k] = Complex(re[k], im[k]);
    return s;
}

std::vector<BinValue> FftPlan::transform_bins(std::span<const double> x,
                                              std::span<const std::size_t> wanted) const {
    for (const auto k : wanted) {
        if (k > n_ / 2) {
            throw ConfigError("wanted bin " + std::to_string(k) + " outside [0, n/2]");
        }
    }
    std::vector<double> re, im;
    butterflies(x, re, im);
    std::vector<BinValue> out;
    out.reserve(wanted.size());
    for (const auto k : wanted) {
        const std::size_t pos = bit_reverse(k, bits_);
        BinValue b;
        b.bin = k;
        b.value = Complex(re[pos], im[pos]);
        b.magnitude = std::abs(b.value);
        b.phase = std::arg(b.value);
        out.push_back(b);
    }
    return out;
}

std::size_t FftPlan::twiddle_bytes() const {
    return (tw_re_.size() + tw_im_.size()) * sizeof(double);
}

std::size_t FftPlan::bitrev_bytes() const { return bitrev_.size() * sizeof(std::uint32_t); }

Spectrum fft(std::span<const double> x, std::size_t n, double fs) {
    return FftPlan(n, Reorder::table).transform(x, fs);
}

std::vector<BinValue> fft_skip_reorder(std::span<const double> x, std::size_t n,
                                       std::span<const std::size_t> wanted_bins) {
    return FftPlan(n, Reorder::skip).transform_bins(x, wanted_bins);
}

}  // namespace edgenilm
