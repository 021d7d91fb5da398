#include "edgenilm/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "edgenilm/error.hpp"

namespace edgenilm {

Tensor::Tensor(std::vector<std::size_t> shape_, double fill) : shape(std::move(shape_)) {
    const std::size_t n =
        std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    data.assign(n, fill);
}

Tensor::Tensor(std::vector<std::size_t> shape_, std::vector<double> values)
    : shape(std::move(shape_)), data(std::move(values)) {
    const std::size_t n =
        std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    if (n != data.size()) throw ShapeError("tensor data does not match its shape");
}

double h_sigmoid(double x) { return std::min(std::max(x + 3.0, 0.0), 6.0) / 6.0; }
double h_swish(double x) { return x * h_sigmoid(x); }
double h_sigmoid_grad(double x) { return (x > -3.0 && x < 3.0) ? 1.0 / 6.0 : 0.0; }

double h_swish_grad(double x) {
    if (x <= -3.0) return 0.0;
    if (x >= 3.0) return 1.0;
    return (2.0 * x + 3.0) / 6.0;
}

Tensor h_sigmoid(const Tensor& x) {
    Tensor y = x;
    for (auto& v : y.data) v = h_sigmoid(v);
    return y;
}

Tensor h_swish(const Tensor& x) {
    Tensor y = x;
    for (auto& v : y.data) v = h_swish(v);
    return y;
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}

void require_2d(const Tensor& t, const char* what) { require(t.shape.size() == 2, what); }

}  // namespace

Tensor conv1d(const Tensor& input, const Tensor& kernel, std::span<const double> bias) {
    require_2d(input, "conv1d input must be [C, L]");
    require(kernel.shape.size() == 3, "conv1d kernel must be [C_out, C_in, k]");
    const std::size_t cin = input.dim(0), len = input.dim(1);
    const std::size_t cout = kernel.dim(0), k = kernel.dim(2);
    require(kernel.dim(1) == cin, "conv1d channel mismatch");
    require(k % 2 == 1, "conv1d kernel size must be odd");
    require(bias.empty() || bias.size() == cout, "conv1d bias size mismatch");
    const long pad = static_cast<long>(k / 2);

    Tensor out({cout, len});
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t l = 0; l < len; ++l) {
            double acc = bias.empty() ? 0.0 : bias[o];
            for (std::size_t c = 0; c < cin; ++c) {
                for (std::size_t t = 0; t < k; ++t) {
                    const long src = static_cast<long>(l) + static_cast<long>(t) - pad;
                    if (src < 0 || src >= static_cast<long>(len)) continue;
                    acc += kernel(o, c, t) * input(c, static_cast<std::size_t>(src));
                }
            }
            out(o, l) = acc;
        }
    }
    return out;
}

Tensor depthwise_conv1d(const Tensor& input, const Tensor& kernel) {
    require_2d(input, "depthwise input must be [C, L]");
    require_2d(kernel, "depthwise kernel must be [C, k]");
    const std::size_t ch = input.dim(0), len = input.dim(1), k = kernel.dim(1);
    require(kernel.dim(0) == ch, "depthwise channel mismatch");
    require(k % 2 == 1, "depthwise kernel size must be odd");
    const long pad = static_cast<long>(k / 2);

    Tensor out({ch, len});
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t l = 0; l < len; ++l) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                const long src = static_cast<long>(l) + static_cast<long>(t) - pad;
                if (src < 0 || src >= static_cast<long>(len)) continue;
                acc += kernel(c, t) * input(c, static_cast<std::size_t>(src));
            }
            out(c, l) = acc;
        }
    }
    return out;
}

Tensor pointwise_conv1d(const Tensor& input, const Tensor& kernel, std::span<const double> bias) {
    require_2d(input, "pointwise input must be [C, L]");
    require_2d(kernel, "pointwise kernel must be [C', C]");
    const std::size_t cin = input.dim(0), len = input.dim(1), cout = kernel.dim(0);
    require(kernel.dim(1) == cin, "pointwise channel mismatch");
    require(bias.empty() || bias.size() == cout, "pointwise bias size mismatch");

    Tensor out({cout, len});
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t l = 0; l < len; ++l) {
            double acc = bias.empty() ? 0.0 : bias[o];
            for (std::size_t c = 0; c < cin; ++c) acc += kernel(o, c) * input(c, l);
            out(o, l) = acc;
        }
    }
    return out;
}

Tensor depthwise_separable_conv(const Tensor& input, const Tensor& depthwise,
                                const Tensor& pointwise) {
    return pointwise_conv1d(depthwise_conv1d(input, depthwise), pointwise);
}

std::size_t depthwise_separable_params(std::size_t channels, std::size_t out_channels,
                                       std::size_t k) {
    return channels * k + channels * out_channels;
}

namespace {

struct SeCache {
    std::vector<double> z, u, r, v, s;
};

Tensor se_forward(const Tensor& input, const SeWeights& w, SeCache* cache) {
    require_2d(input, "SE input must be [C, L]");
    const std::size_t ch = input.dim(0), len = input.dim(1);
    require(w.fc1_w.shape.size() == 2 && w.fc2_w.shape.size() == 2, "SE weights must be 2-D");
    const std::size_t hidden = w.fc1_w.dim(0);
    require(w.fc1_w.dim(1) == ch && w.fc2_w.dim(0) == ch && w.fc2_w.dim(1) == hidden,
            "SE weight shapes do not match the channel count");
    require(w.fc1_b.size() == hidden && w.fc2_b.size() == ch, "SE bias sizes mismatch");

    SeCache local;
    SeCache& c = cache ? *cache : local;
    c.z.assign(ch, 0.0);
    for (std::size_t k = 0; k < ch; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < len; ++l) acc += input(k, l);
        c.z[k] = acc / static_cast<double>(len);
    }
    c.u.assign(hidden, 0.0);
    c.r.assign(hidden, 0.0);
    for (std::size_t h = 0; h < hidden; ++h) {
        double acc = w.fc1_b[h];
        for (std::size_t k = 0; k < ch; ++k) acc += w.fc1_w(h, k) * c.z[k];
        c.u[h] = acc;
        c.r[h] = std::max(acc, 0.0);
    }
    c.v.assign(ch, 0.0);
    c.s.assign(ch, 0.0);
    for (std::size_t k = 0; k < ch; ++k) {
        double acc = w.fc2_b[k];
        for (std::size_t h = 0; h < hidden; ++h) acc += w.fc2_w(k, h) * c.r[h];
        c.v[k] = acc;
        c.s[k] = h_sigmoid(acc);
    }
    Tensor out = input;
    for (std::size_t k = 0; k < ch; ++k) {
        for (std::size_t l = 0; l < len; ++l) out(k, l) *= c.s[k];
    }
    return out;
}

}  // namespace

Tensor se_block(const Tensor& input, const SeWeights& w) { return se_forward(input, w, nullptr); }

std::vector<double> softmax(std::span<const double> z) {
    if (z.empty()) throw DomainError("softmax of an empty vector");
    const double top = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        p[k] = std::exp(z[k] - top);
        sum += p[k];
    }
    for (auto& v : p) v /= sum;
    return p;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
    if (label >= probs.size()) throw DomainError("label index out of range");
    return -std::log(std::max(probs[label], 1e-12));
}

void ArchSpec::validate() const {
    if (input_length == 0 || classes < 2) throw ConfigError("model needs an input and >= 2 classes");
    if (kernel % 2 == 0) throw ConfigError("kernel size must be odd");
    if (se_reduction < 1) throw ConfigError("SE reduction ratio must be >= 1");
    if (blocks.size() < 2 || blocks.size() > 4) throw ConfigError("MobileMini uses 2 to 4 blocks");
    std::size_t ch = stem_channels;
    for (const auto& b : blocks) {
        if (b.in_channels != ch) throw ShapeError("block input channels do not chain");
        if (b.use_se && b.in_channels / se_reduction == 0) {
            throw ConfigError("SE reduction leaves no hidden units");
        }
        ch = b.out_channels;
    }
}

ArchSpec ArchSpec::mobile_mini(std::size_t input_length, std::size_t classes) {
    ArchSpec a;
    a.input_length = input_length;
    a.classes = classes;
    return a;
}

namespace {

void xavier(std::vector<double>& w, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& x : w) x = dist(rng);
}

std::size_t last_channels(const ArchSpec& a) {
    return a.blocks.empty() ? a.stem_channels : a.blocks.back().out_channels;
}

}  // namespace

MobileMiniModel MobileMiniModel::create(const ArchSpec& arch, std::uint64_t seed) {
    arch.validate();
    std::mt19937_64 rng(seed);
    MobileMiniModel m;
    m.arch = arch;
    m.input_mean.assign(arch.input_length, 0.0);
    m.input_scale.assign(arch.input_length, 1.0);
    const std::size_t k = arch.kernel;

    m.stem_w = Tensor({arch.stem_channels, 1, k});
    xavier(m.stem_w.data, k, arch.stem_channels * k, rng);
    m.stem_b.assign(arch.stem_channels, 0.0);

    for (const auto& spec : arch.blocks) {
        DsBlock b;
        b.spec = spec;
        const std::size_t c = spec.in_channels, co = spec.out_channels;
        b.dw = Tensor({c, k});
        xavier(b.dw.data, k, k, rng);
        if (spec.use_se) {
            const std::size_t hidden = c / arch.se_reduction;
            b.se.fc1_w = Tensor({hidden, c});
            xavier(b.se.fc1_w.data, c, hidden, rng);
            b.se.fc1_b.assign(hidden, 0.0);
            b.se.fc2_w = Tensor({c, hidden});
            xavier(b.se.fc2_w.data, hidden, c, rng);
            b.se.fc2_b.assign(c, 0.0);
        }
        b.pw = Tensor({co, c});
        xavier(b.pw.data, c, co, rng);
        b.pw_b.assign(co, 0.0);
        m.blocks.push_back(std::move(b));
    }
    const std::size_t cl = last_channels(arch);
    m.dense_w = Tensor({arch.classes, cl});
    xavier(m.dense_w.data, cl, arch.classes, rng);
    m.dense_b.assign(arch.classes, 0.0);
    return m;
}

std::vector<std::pair<std::string, std::vector<double>*>> MobileMiniModel::parameters() {
    std::vector<std::pair<std::string, std::vector<double>*>> p;
    p.emplace_back("stem.weight", &stem_w.data);
    p.emplace_back("stem.bias", &stem_b);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string pre = "block" + std::to_string(i) + ".";
        auto& b = blocks[i];
        p.emplace_back(pre + "dw.weight", &b.dw.data);
        if (b.spec.use_se) {
            p.emplace_back(pre + "se.fc1.weight", &b.se.fc1_w.data);
            p.emplace_back(pre + "se.fc1.bias", &b.se.fc1_b);
            p.emplace_back(pre + "se.fc2.weight", &b.se.fc2_w.data);
            p.emplace_back(pre + "se.fc2.bias", &b.se.fc2_b);
        }
        p.emplace_back(pre + "pw.weight", &b.pw.data);
        p.emplace_back(pre + "pw.bias", &b.pw_b);
    }
    p.emplace_back("dense.weight", &dense_w.data);
    p.emplace_back("dense.bias", &dense_b);
    return p;
}

std::vector<std::pair<std::string, const std::vector<double>*>> MobileMiniModel::parameters() const {
    auto mut = const_cast<MobileMiniModel*>(this)->parameters();
    std::vector<std::pair<std::string, const std::vector<double>*>> p;
    for (auto& [name, ptr] : mut) p.emplace_back(name, ptr);
    return p;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> MobileMiniModel::parameter_shapes() const {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> s;
    s.emplace_back("stem.weight", stem_w.shape);
    s.emplace_back("stem.bias", std::vector<std::size_t>{stem_b.size()});
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string pre = "block" + std::to_string(i) + ".";
        const auto& b = blocks[i];
        s.emplace_back(pre + "dw.weight", b.dw.shape);
        if (b.spec.use_se) {
            s.emplace_back(pre + "se.fc1.weight", b.se.fc1_w.shape);
            s.emplace_back(pre + "se.fc1.bias", std::vector<std::size_t>{b.se.fc1_b.size()});
            s.emplace_back(pre + "se.fc2.weight", b.se.fc2_w.shape);
            s.emplace_back(pre + "se.fc2.bias", std::vector<std::size_t>{b.se.fc2_b.size()});
        }
        s.emplace_back(pre + "pw.weight", b.pw.shape);
        s.emplace_back(pre + "pw.bias", std::vector<std::size_t>{b.pw_b.size()});
    }
    s.emplace_back("dense.weight", dense_w.shape);
    s.emplace_back("dense.bias", std::vector<std::size_t>{dense_b.size()});
    return s;
}

std::size_t MobileMiniModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, ptr] : parameters()) n += ptr->size();
    return n;
}

MobileMiniModel zeros_like(const MobileMiniModel& model) {
    MobileMiniModel z = model;
    for (auto& [name, ptr] : z.parameters()) std::fill(ptr->begin(), ptr->end(), 0.0);
    return z;
}

namespace {

struct BlockCache {
    Tensor in;    // block input
    Tensor a;     // depthwise output
    Tensor h;     // h_swish(a)
    SeCache se;
    Tensor g;     // SE output (or h)
    Tensor p;     // pointwise output
};

struct ForwardCache {
    Tensor x;       // standardized input [1, L]
    Tensor stem;    // pre-activation
    std::vector<BlockCache> blocks;
    Tensor last;    // output of the final block
    std::vector<double> pooled;
    std::vector<double> logits;
};

Tensor apply(const Tensor& t, double (*f)(double)) {
    Tensor y = t;
    for (auto& v : y.data) v = f(v);
    return y;
}

std::vector<double> run_forward(const MobileMiniModel& m, std::span<const double> features,
                                ForwardCache* cache) {
    if (features.size() != m.arch.input_length) {
        throw ShapeError("feature length " + std::to_string(features.size()) +
                         " does not match model input " + std::to_string(m.arch.input_length));
    }
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;

    c.x = Tensor({1, features.size()});
    for (std::size_t k = 0; k < features.size(); ++k) {
        c.x.data[k] = (features[k] - m.input_mean[k]) / m.input_scale[k];
    }
    c.stem = conv1d(c.x, m.stem_w, m.stem_b);
    Tensor act = apply(c.stem, h_swish);

    c.blocks.resize(m.blocks.size());
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        const auto& b = m.blocks[i];
        auto& bc = c.blocks[i];
        bc.in = std::move(act);
        bc.a = depthwise_conv1d(bc.in, b.dw);
        bc.h = apply(bc.a, h_swish);
        bc.g = b.spec.use_se ? se_forward(bc.h, b.se, &bc.se) : bc.h;
        bc.p = pointwise_conv1d(bc.g, b.pw, b.pw_b);
        act = apply(bc.p, h_swish);
    }
    c.last = std::move(act);

    const std::size_t ch = c.last.dim(0), len = c.last.dim(1);
    c.pooled.assign(ch, 0.0);
    for (std::size_t k = 0; k < ch; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < len; ++l) acc += c.last(k, l);
        c.pooled[k] = acc / static_cast<double>(len);
    }
    c.logits.assign(m.arch.classes, 0.0);
    for (std::size_t o = 0; o < m.arch.classes; ++o) {
        double acc = m.dense_b[o];
        for (std::size_t k = 0; k < ch; ++k) acc += m.dense_w(o, k) * c.pooled[k];
        c.logits[o] = acc;
    }
    return c.logits;
}

// d(conv1d)/d(input, kernel, bias) for same padding.
Tensor conv1d_backward(const Tensor& input, const Tensor& kernel, const Tensor& dout,
                       std::vector<double>& dkernel, std::vector<double>& dbias) {
    const std::size_t cin = input.dim(0), len = input.dim(1);
    const std::size_t cout = kernel.dim(0), k = kernel.dim(2);
    const long pad = static_cast<long>(k / 2);
    Tensor din({cin, len});
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t l = 0; l < len; ++l) {
            const double g = dout(o, l);
            dbias[o] += g;
            for (std::size_t c = 0; c < cin; ++c) {
                for (std::size_t t = 0; t < k; ++t) {
                    const long src = static_cast<long>(l) + static_cast<long>(t) - pad;
                    if (src < 0 || src >= static_cast<long>(len)) continue;
                    const auto s = static_cast<std::size_t>(src);
                    dkernel[(o * cin + c) * k + t] += g * input(c, s);
                    din(c, s) += g * kernel(o, c, t);
                }
            }
        }
    }
    return din;
}

Tensor depthwise_backward(const Tensor& input, const Tensor& kernel, const Tensor& dout,
                          std::vector<double>& dkernel) {
    const std::size_t ch = input.dim(0), len = input.dim(1), k = kernel.dim(1);
    const long pad = static_cast<long>(k / 2);
    Tensor din({ch, len});
    for (std::size_t c = 0; c < ch; ++c) {
        for (std::size_t l = 0; l < len; ++l) {
            const double g = dout(c, l);
            for (std::size_t t = 0; t < k; ++t) {
                const long src = static_cast<long>(l) + static_cast<long>(t) - pad;
                if (src < 0 || src >= static_cast<long>(len)) continue;
                const auto s = static_cast<std::size_t>(src);
                dkernel[c * k + t] += g * input(c, s);
                din(c, s) += g * kernel(c, t);
            }
        }
    }
    return din;
}

Tensor pointwise_backward(const Tensor& input, const Tensor& kernel, const Tensor& dout,
                          std::vector<double>& dkernel, std::vector<double>& dbias) {
    const std::size_t cin = input.dim(0), len = input.dim(1), cout = kernel.dim(0);
    Tensor din({cin, len});
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t l = 0; l < len; ++l) {
            const double g = dout(o, l);
            dbias[o] += g;
            for (std::size_t c = 0; c < cin; ++c) {
                dkernel[o * cin + c] += g * input(c, l);
                din(c, l) += g * kernel(o, c);
            }
        }
    }
    return din;
}

Tensor se_backward(const Tensor& input, const SeWeights& w, const SeCache& c, const Tensor& dout,
                   SeWeights& dw) {
    const std::size_t ch = input.dim(0), len = input.dim(1), hidden = w.fc1_w.dim(0);
    Tensor din({ch, len});
    std::vector<double> dv(ch, 0.0);
    for (std::size_t k = 0; k < ch; ++k) {
        double ds = 0.0;
        for (std::size_t l = 0; l < len; ++l) {
            din(k, l) = dout(k, l) * c.s[k];
            ds += dout(k, l) * input(k, l);
        }
        dv[k] = ds * h_sigmoid_grad(c.v[k]);
    }
    std::vector<double> du(hidden, 0.0);
    for (std::size_t k = 0; k < ch; ++k) {
        dw.fc2_b[k] += dv[k];
        for (std::size_t h = 0; h < hidden; ++h) {
            dw.fc2_w(k, h) += dv[k] * c.r[h];
            du[h] += dv[k] * w.fc2_w(k, h);
        }
    }
    std::vector<double> dz(ch, 0.0);
    for (std::size_t h = 0; h < hidden; ++h) {
        if (c.u[h] <= 0.0) continue;
        dw.fc1_b[h] += du[h];
        for (std::size_t k = 0; k < ch; ++k) {
            dw.fc1_w(h, k) += du[h] * c.z[k];
            dz[k] += du[h] * w.fc1_w(h, k);
        }
    }
    for (std::size_t k = 0; k < ch; ++k) {
        const double g = dz[k] / static_cast<double>(len);
        for (std::size_t l = 0; l < len; ++l) din(k, l) += g;
    }
    return din;
}

void mul_activation_grad(Tensor& grad, const Tensor& pre, double (*df)(double)) {
    for (std::size_t k = 0; k < grad.data.size(); ++k) grad.data[k] *= df(pre.data[k]);
}

}  // namespace

DsConvGrad depthwise_separable_backward(const Tensor& input, const Tensor& depthwise,
                                        const Tensor& pointwise, const Tensor& dout) {
    const Tensor mid = depthwise_conv1d(input, depthwise);
    DsConvGrad g{Tensor(input.shape), Tensor(depthwise.shape), Tensor(pointwise.shape)};
    std::vector<double> unused_bias(pointwise.dim(0), 0.0);
    const Tensor dmid = pointwise_backward(mid, pointwise, dout, g.pointwise.data, unused_bias);
    g.input = depthwise_backward(input, depthwise, dmid, g.depthwise.data);
    return g;
}

SeGrad se_block_backward(const Tensor& input, const SeWeights& w, const Tensor& dout) {
    SeCache cache;
    se_forward(input, w, &cache);
    SeGrad g;
    g.weights = {Tensor(w.fc1_w.shape), std::vector<double>(w.fc1_b.size(), 0.0),
                 Tensor(w.fc2_w.shape), std::vector<double>(w.fc2_b.size(), 0.0)};
    g.input = se_backward(input, w, cache, dout, g.weights);
    return g;
}

DenseGrad dense_softmax_xent_backward(std::span<const double> x, const Tensor& w,
                                      std::span<const double> b, std::size_t label) {
    require_2d(w, "dense weight must be [out, in]");
    const std::size_t out = w.dim(0), in = w.dim(1);
    require(x.size() == in && b.size() == out, "dense shapes mismatch");
    if (label >= out) throw DomainError("label index out of range");
    std::vector<double> z(out);
    for (std::size_t o = 0; o < out; ++o) {
        double acc = b[o];
        for (std::size_t k = 0; k < in; ++k) acc += w(o, k) * x[k];
        z[o] = acc;
    }
    const auto p = softmax(z);
    DenseGrad g;
    g.loss = cross_entropy(p, label);
    g.input.assign(in, 0.0);
    g.weight = Tensor(w.shape);
    g.bias.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
        const double d = p[o] - (o == label ? 1.0 : 0.0);
        g.bias[o] = d;
        for (std::size_t k = 0; k < in; ++k) {
            g.weight(o, k) = d * x[k];
            g.input[k] += d * w(o, k);
        }
    }
    return g;
}

std::vector<double> logits(const MobileMiniModel& model, std::span<const double> features) {
    return run_forward(model, features, nullptr);
}

std::vector<double> forward(const MobileMiniModel& model, std::span<const double> features) {
    const auto z = run_forward(model, features, nullptr);
    for (const double v : z) {
        if (!std::isfinite(v)) throw InferenceError("non-finite logit during inference");
    }
    auto p = softmax(z);
    for (const double v : p) {
        if (!std::isfinite(v)) throw InferenceError("non-finite probability during inference");
    }
    return p;
}

double backward(const MobileMiniModel& m, std::span<const double> features, std::size_t label,
                MobileMiniModel& grads) {
    if (label >= m.arch.classes) throw DomainError("label index out of range");
    ForwardCache c;
    run_forward(m, features, &c);
    const auto probs = softmax(c.logits);
    const double loss = cross_entropy(probs, label);

    const std::size_t ch = c.last.dim(0), len = c.last.dim(1);
    std::vector<double> dpooled(ch, 0.0);
    for (std::size_t o = 0; o < m.arch.classes; ++o) {
        const double g = probs[o] - (o == label ? 1.0 : 0.0);
        grads.dense_b[o] += g;
        for (std::size_t k = 0; k < ch; ++k) {
            grads.dense_w(o, k) += g * c.pooled[k];
            dpooled[k] += g * m.dense_w(o, k);
        }
    }
    Tensor dact({ch, len});
    for (std::size_t k = 0; k < ch; ++k) {
        for (std::size_t l = 0; l < len; ++l) dact(k, l) = dpooled[k] / static_cast<double>(len);
    }

    for (std::size_t i = m.blocks.size(); i-- > 0;) {
        const auto& b = m.blocks[i];
        const auto& bc = c.blocks[i];
        auto& gb = grads.blocks[i];
        mul_activation_grad(dact, bc.p, h_swish_grad);
        Tensor dg = pointwise_backward(bc.g, b.pw, dact, gb.pw.data, gb.pw_b);
        Tensor dh = b.spec.use_se ? se_backward(bc.h, b.se, bc.se, dg, gb.se) : std::move(dg);
        mul_activation_grad(dh, bc.a, h_swish_grad);
        dact = depthwise_backward(bc.in, b.dw, dh, gb.dw.data);
    }
    mul_activation_grad(dact, c.stem, h_swish_grad);
    conv1d_backward(c.x, m.stem_w, dact, grads.stem_w.data, grads.stem_b);
    return loss;
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch size must be positive");
    if (weight_init != "xavier_uniform") {
        throw ConfigError("unsupported weight init '" + weight_init + "'");
    }
}

void fit_standardization(MobileMiniModel& model, std::span<const Example> data) {
    const std::size_t d = model.arch.input_length;
    if (data.empty()) throw DomainError("cannot standardize on an empty dataset");
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (const auto& e : data) {
        if (e.x.size() != d) throw ShapeError("example length does not match the model input");
        for (std::size_t k = 0; k < d; ++k) mean[k] += e.x[k];
    }
    for (auto& v : mean) v /= static_cast<double>(data.size());
    for (const auto& e : data) {
        for (std::size_t k = 0; k < d; ++k) var[k] += (e.x[k] - mean[k]) * (e.x[k] - mean[k]);
    }
    model.input_mean = mean;
    model.input_scale.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        model.input_scale[k] = std::max(std::sqrt(var[k] / static_cast<double>(data.size())), 1e-12);
    }
}

TrainResult train(MobileMiniModel model, std::span<const Example> data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw DomainError("training set is empty");
    for (const auto& e : data) {
        if (e.label >= model.arch.classes) throw DomainError("training label out of range");
    }

    TrainResult result;
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    MobileMiniModel grads = zeros_like(model);
    auto params = model.parameters();
    auto gparams = grads.parameters();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            for (auto& [name, g] : gparams) std::fill(g->begin(), g->end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const auto& e = data[order[k]];
                batch_loss += backward(model, e.x, e.label, grads);
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingError("loss diverged in epoch " + std::to_string(epoch) +
                                    " (learning rate " + std::to_string(cfg.learning_rate) + ")");
            }
            epoch_loss += batch_loss;
            const double scale = cfg.learning_rate / static_cast<double>(stop - start);
            for (std::size_t p = 0; p < params.size(); ++p) {
                auto& w = *params[p].second;
                const auto& g = *gparams[p].second;
                for (std::size_t k = 0; k < w.size(); ++k) w[k] -= scale * g[k];
            }
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(data.size()));
    }
    result.model = std::move(model);
    return result;
}

}  // namespace edgenilm
