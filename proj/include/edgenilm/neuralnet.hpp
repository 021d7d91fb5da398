#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace edgenilm {

/// Dense row-major tensor of doubles.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape_, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t k) const { return shape.at(k); }

    /// 2-D access, (channel, position).
    double& operator()(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }
    /// 3-D access, (out, in, tap).
    double& operator()(std::size_t a, std::size_t b, std::size_t c) {
        return data[(a * shape[1] + b) * shape[2] + c];
    }
    double operator()(std::size_t a, std::size_t b, std::size_t c) const {
        return data[(a * shape[1] + b) * shape[2] + c];
    }
};

// Hard activations.
double h_sigmoid(double x);
double h_swish(double x);
double h_sigmoid_grad(double x);
double h_swish_grad(double x);
Tensor h_sigmoid(const Tensor& x);
Tensor h_swish(const Tensor& x);

/// Standard 1-D convolution, same padding. input [C_in, L], kernel [C_out, C_in, k].
Tensor conv1d(const Tensor& input, const Tensor& kernel, std::span<const double> bias = {});
/// Per-channel convolution, same padding. input [C, L], kernel [C, k].
Tensor depthwise_conv1d(const Tensor& input, const Tensor& kernel);
/// 1x1 projection. input [C, L], kernel [C', C].
Tensor pointwise_conv1d(const Tensor& input, const Tensor& kernel, std::span<const double> bias = {});
/// Depthwise then pointwise; C*k + C*C' weights instead of C*C'*k.
Tensor depthwise_separable_conv(const Tensor& input, const Tensor& depthwise, const Tensor& pointwise);
std::size_t depthwise_separable_params(std::size_t channels, std::size_t out_channels, std::size_t k);

/// Squeeze-and-excitation weights: fc1 [C/r, C], fc2 [C, C/r].
struct SeWeights {
    Tensor fc1_w;
    std::vector<double> fc1_b;
    Tensor fc2_w;
    std::vector<double> fc2_b;
};

/// out[c] = in[c] * h_sigmoid(fc2(relu(fc1(mean_l in[c]))))[c].
Tensor se_block(const Tensor& input, const SeWeights& w);

std::vector<double> softmax(std::span<const double> logits);
/// -log(max(probs[label], 1e-12)).
double cross_entropy(std::span<const double> probs, std::size_t label);

/// Gradients of a scalar loss through single layers, given d(loss)/d(output).
struct DsConvGrad {
    Tensor input;
    Tensor depthwise;
    Tensor pointwise;
};
DsConvGrad depthwise_separable_backward(const Tensor& input, const Tensor& depthwise,
                                        const Tensor& pointwise, const Tensor& dout);

struct SeGrad {
    Tensor input;
    SeWeights weights;
};
SeGrad se_block_backward(const Tensor& input, const SeWeights& w, const Tensor& dout);

/// Dense layer z = W x + b followed by softmax and cross-entropy.
struct DenseGrad {
    double loss = 0.0;
    std::vector<double> input;
    Tensor weight;
    std::vector<double> bias;
};
DenseGrad dense_softmax_xent_backward(std::span<const double> x, const Tensor& w,
                                      std::span<const double> b, std::size_t label);

struct BlockSpec {
    std::size_t in_channels = 8;
    std::size_t out_channels = 16;
    bool use_se = false;
};

struct ArchSpec {
    std::size_t input_length = 20;
    std::size_t classes = 5;
    std::size_t stem_channels = 8;
    std::size_t kernel = 3;
    std::size_t se_reduction = 4;
    std::vector<BlockSpec> blocks{{8, 16, true}, {16, 16, false}};

    void validate() const;
    static ArchSpec mobile_mini(std::size_t input_length, std::size_t classes);
};

struct DsBlock {
    BlockSpec spec;
    Tensor dw;               // [C, k]
    SeWeights se;            // empty unless spec.use_se
    Tensor pw;               // [C', C]
    std::vector<double> pw_b;
};

/// conv(1->8) + h-swish, depthwise-separable blocks (dw -> h-swish -> SE ->
/// pw -> h-swish), global average pool, dense -> softmax. Inputs are
/// standardized with the stored per-feature mean/scale before the stem.
struct MobileMiniModel {
    ArchSpec arch;
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    Tensor stem_w;  // [8, 1, k]
    std::vector<double> stem_b;
    std::vector<DsBlock> blocks;
    Tensor dense_w;  // [classes, C_last]
    std::vector<double> dense_b;

    /// Xavier-uniform weights, zero biases, identity standardization.
    static MobileMiniModel create(const ArchSpec& arch, std::uint64_t seed);

    std::size_t parameter_count() const;
    /// Every trainable array, in a fixed order.
    std::vector<std::pair<std::string, std::vector<double>*>> parameters();
    std::vector<std::pair<std::string, const std::vector<double>*>> parameters() const;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_shapes() const;
};

/// Class probabilities; throws InferenceError on non-finite output.
std::vector<double> forward(const MobileMiniModel& model, std::span<const double> features);
std::vector<double> logits(const MobileMiniModel& model, std::span<const double> features);

/// Gradient of the cross-entropy loss for one example, same layout as the
/// model's parameters(). Returns the loss.
double backward(const MobileMiniModel& model, std::span<const double> features, std::size_t label,
                MobileMiniModel& grads);

/// A model-shaped copy with every parameter zeroed.
MobileMiniModel zeros_like(const MobileMiniModel& model);

struct Example {
    std::vector<double> x;
    std::size_t label = 0;
};

struct TrainConfig {
    double learning_rate = 0.05;
    std::size_t epochs = 300;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    std::string weight_init = "xavier_uniform";

    void validate() const;
};

struct TrainResult {
    MobileMiniModel model;
    std::vector<double> loss_history;  // mean training loss per epoch
};

/// Per-feature mean and standard deviation (floored at 1e-12) of the data.
void fit_standardization(MobileMiniModel& model, std::span<const Example> data);

/// Plain mini-batch SGD on the mean cross-entropy. Deterministic for a seed.
TrainResult train(MobileMiniModel model, std::span<const Example> data, const TrainConfig& cfg);

std::string save_model_json(const MobileMiniModel& model);
MobileMiniModel load_model_json(const std::string& text);

}  // namespace edgenilm
