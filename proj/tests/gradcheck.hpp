#pragma once

// Analytic-vs-central-difference gradient checks shared by the unit tests
// and the acceptance run. Each returns the worst relative error seen over
// `points` random draws. Relative error is taken per gradient array:
// ||a - n|| / max(||a|| + ||n||, 1e-12).

#include <cmath>
#include <random>
#include <vector>

#include "edgenilm/neuralnet.hpp"

namespace gradcheck {

using edgenilm::Tensor;

inline double array_error(const std::vector<double>& a, const std::vector<double>& n) {
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - n[k]) * (a[k] - n[k]);
        na += a[k] * a[k];
        nn += n[k] * n[k];
    }
    const double denom = std::sqrt(na) + std::sqrt(nn);
    return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

template <typename Loss>
std::vector<double> numeric(std::vector<double>& x, Loss&& loss, double h = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double keep = x[k];
        x[k] = keep + h;
        const double up = loss();
        x[k] = keep - h;
        const double down = loss();
        x[k] = keep;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

inline bool near_kink(double x, double margin = 1e-3) {
    return std::abs(x - 3.0) < margin || std::abs(x + 3.0) < margin;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double scale = 1.0) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& v : t.data) v = u(rng);
    return t;
}

inline double dot(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k) s += a.data[k] * b.data[k];
    return s;
}

/// Scalar activations, checked pointwise against (f(x+h) - f(x-h)) / 2h.
template <typename F, typename G>
double activation(F&& f, G&& grad, std::size_t points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    double worst = 0.0;
    for (std::size_t p = 0; p < points;) {
        const double x = u(rng);
        if (near_kink(x)) continue;
        const double h = 1e-6;
        const double n = (f(x + h) - f(x - h)) / (2.0 * h);
        const double a = grad(x);
        const double denom = std::abs(a) + std::abs(n);
        worst = std::max(worst, denom < 1e-12 ? std::abs(a - n) : std::abs(a - n) / denom);
        ++p;
    }
    return worst;
}

inline double h_swish(std::size_t points, std::uint64_t seed) {
    return activation([](double x) { return edgenilm::h_swish(x); },
                      [](double x) { return edgenilm::h_swish_grad(x); }, points, seed);
}

inline double h_sigmoid(std::size_t points, std::uint64_t seed) {
    return activation([](double x) { return edgenilm::h_sigmoid(x); },
                      [](double x) { return edgenilm::h_sigmoid_grad(x); }, points, seed);
}

/// Loss = <r, dsconv(input)> with random r.
inline double depthwise_separable(std::size_t points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        Tensor in = random_tensor({4, 12}, rng), dw = random_tensor({4, 3}, rng),
               pw = random_tensor({6, 4}, rng);
        const Tensor r = random_tensor({6, 12}, rng);
        auto loss = [&] { return dot(r, edgenilm::depthwise_separable_conv(in, dw, pw)); };
        const auto g = edgenilm::depthwise_separable_backward(in, dw, pw, r);
        worst = std::max(worst, array_error(g.input.data, numeric(in.data, loss)));
        worst = std::max(worst, array_error(g.depthwise.data, numeric(dw.data, loss)));
        worst = std::max(worst, array_error(g.pointwise.data, numeric(pw.data, loss)));
    }
    return worst;
}

/// Loss = <r, se(input)>; draws whose ReLU or h-sigmoid inputs sit near a
/// kink are redrawn.
inline double se_block(std::size_t points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t ch = 8, hidden = 2, len = 10;
    double worst = 0.0;
    for (std::size_t p = 0; p < points;) {
        Tensor in = random_tensor({ch, len}, rng, 2.0);
        edgenilm::SeWeights w{random_tensor({hidden, ch}, rng, 1.5), {}, random_tensor({ch, hidden}, rng, 3.0), {}};
        Tensor b1 = random_tensor({hidden}, rng), b2 = random_tensor({ch}, rng);
        w.fc1_b = b1.data;
        w.fc2_b = b2.data;
        const Tensor r = random_tensor({ch, len}, rng);

        std::vector<double> z(ch, 0.0), hid(hidden, 0.0);
        for (std::size_t c = 0; c < ch; ++c) {
            for (std::size_t l = 0; l < len; ++l) z[c] += in(c, l) / static_cast<double>(len);
        }
        bool kink = false;
        for (std::size_t h = 0; h < hidden; ++h) {
            double u = w.fc1_b[h];
            for (std::size_t c = 0; c < ch; ++c) u += w.fc1_w(h, c) * z[c];
            kink = kink || std::abs(u) < 1e-3;
            hid[h] = std::max(u, 0.0);
        }
        for (std::size_t c = 0; c < ch; ++c) {
            double v = w.fc2_b[c];
            for (std::size_t h = 0; h < hidden; ++h) v += w.fc2_w(c, h) * hid[h];
            kink = kink || near_kink(v);
        }
        if (kink) continue;

        auto loss = [&] { return dot(r, edgenilm::se_block(in, w)); };
        const auto g = edgenilm::se_block_backward(in, w, r);
        worst = std::max(worst, array_error(g.input.data, numeric(in.data, loss)));
        worst = std::max(worst, array_error(g.weights.fc1_w.data, numeric(w.fc1_w.data, loss)));
        worst = std::max(worst, array_error(g.weights.fc1_b, numeric(w.fc1_b, loss)));
        worst = std::max(worst, array_error(g.weights.fc2_w.data, numeric(w.fc2_w.data, loss)));
        worst = std::max(worst, array_error(g.weights.fc2_b, numeric(w.fc2_b, loss)));
        ++p;
    }
    return worst;
}

/// Dense layer into softmax and cross-entropy.
inline double dense_softmax_xent(std::size_t points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> label(0, 4);
    double worst = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        Tensor x = random_tensor({16}, rng, 2.0), w = random_tensor({5, 16}, rng), b = random_tensor({5}, rng);
        const std::size_t y = label(rng);
        auto loss = [&] {
            std::vector<double> z(5);
            for (std::size_t o = 0; o < 5; ++o) {
                z[o] = b.data[o];
                for (std::size_t k = 0; k < 16; ++k) z[o] += w(o, k) * x.data[k];
            }
            return edgenilm::cross_entropy(edgenilm::softmax(z), y);
        };
        const auto g = edgenilm::dense_softmax_xent_backward(x.data, w, b.data, y);
        worst = std::max(worst, array_error(g.input, numeric(x.data, loss)));
        worst = std::max(worst, array_error(g.weight.data, numeric(w.data, loss)));
        worst = std::max(worst, array_error(g.bias, numeric(b.data, loss)));
    }
    return worst;
}

}  // namespace gradcheck
