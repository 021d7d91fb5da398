#include <doctest.h>

#include <cmath>
#include <random>

#include "edgenilm/error.hpp"
#include "edgenilm/neuralnet.hpp"
#include "gradcheck.hpp"

using namespace edgenilm;

TEST_CASE("hard activations") {
    CHECK(h_sigmoid(-4.0) == 0.0);
    CHECK(h_sigmoid(0.0) == doctest::Approx(0.5));
    CHECK(h_sigmoid(4.0) == 1.0);
    CHECK(h_swish(1.0) == doctest::Approx(4.0 / 6.0));
    CHECK(h_swish(5.0) == 5.0);
    CHECK(h_swish(-5.0) == 0.0);
}

TEST_CASE("depthwise-separable convolution") {
    std::mt19937_64 rng(1);
    const Tensor in = gradcheck::random_tensor({3, 7}, rng);
    SUBCASE("delta depthwise and identity pointwise pass the input through") {
        Tensor dw({3, 3}), pw({3, 3});
        for (std::size_t c = 0; c < 3; ++c) {
            dw(c, 1) = 1.0;
            pw(c, c) = 1.0;
        }
        CHECK(depthwise_separable_conv(in, dw, pw).data == in.data);
    }
    SUBCASE("equals a full convolution with the factored kernel") {
        const Tensor dw = gradcheck::random_tensor({3, 3}, rng), pw = gradcheck::random_tensor({5, 3}, rng);
        Tensor full({5, 3, 3});
        for (std::size_t o = 0; o < 5; ++o)
            for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t t = 0; t < 3; ++t) full(o, c, t) = pw(o, c) * dw(c, t);
        const auto a = depthwise_separable_conv(in, dw, pw);
        const auto b = conv1d(in, full);
        for (std::size_t k = 0; k < a.data.size(); ++k) CHECK(a.data[k] == doctest::Approx(b.data[k]).epsilon(1e-12));
    }
    CHECK(depthwise_separable_params(8, 16, 3) == 8 * 3 + 8 * 16);
    CHECK_THROWS_AS(depthwise_conv1d(in, Tensor({2, 3})), ShapeError);
}

TEST_CASE("squeeze-and-excitation") {
    std::mt19937_64 rng(2);
    const Tensor in = gradcheck::random_tensor({4, 6}, rng);
    SeWeights w{Tensor({1, 4}), {0.0}, Tensor({4, 1}), std::vector<double>(4, 0.0)};
    SUBCASE("saturated gate keeps the input") {
        w.fc2_b.assign(4, 3.5);
        CHECK(se_block(in, w).data == in.data);
    }
    SUBCASE("closed gate zeroes the output") {
        w.fc2_b.assign(4, -3.5);
        for (const double v : se_block(in, w).data) CHECK(v == 0.0);
    }
    SUBCASE("matches a step-by-step composition") {
        w = {gradcheck::random_tensor({2, 4}, rng), {0.1, -0.2}, gradcheck::random_tensor({4, 2}, rng),
             {0.3, 0.0, -0.1, 0.2}};
        std::vector<double> z(4, 0.0), r(2, 0.0);
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t l = 0; l < 6; ++l) z[c] += in(c, l) / 6.0;
        for (std::size_t h = 0; h < 2; ++h) {
            double u = w.fc1_b[h];
            for (std::size_t c = 0; c < 4; ++c) u += w.fc1_w(h, c) * z[c];
            r[h] = std::max(0.0, u);
        }
        const auto out = se_block(in, w);
        for (std::size_t c = 0; c < 4; ++c) {
            double v = w.fc2_b[c];
            for (std::size_t h = 0; h < 2; ++h) v += w.fc2_w(c, h) * r[h];
            const double s = std::min(std::max(v + 3.0, 0.0), 6.0) / 6.0;
            for (std::size_t l = 0; l < 6; ++l) CHECK(out(c, l) == doctest::Approx(in(c, l) * s).epsilon(1e-12));
        }
    }
}

TEST_CASE("softmax and cross-entropy") {
    const auto p = softmax(std::vector<double>(5, 0.0));
    for (const double v : p) CHECK(v == doctest::Approx(0.2));
    const auto big = softmax(std::vector<double>{1000.0, 0.0});
    CHECK(big[0] == doctest::Approx(1.0));
    CHECK(std::isfinite(big[1]));
    CHECK(cross_entropy(p, 3) == doctest::Approx(std::log(5.0)).epsilon(1e-6));
    CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0) == 0.0);
    CHECK(cross_entropy(std::vector<double>{0.7, 0.1, 0.1, 0.05, 0.05}, 0) ==
          doctest::Approx(0.35667).epsilon(1e-4));
    CHECK(std::isfinite(cross_entropy(std::vector<double>{1.0, 0.0}, 1)));
    CHECK_THROWS_AS(cross_entropy(p, 5), DomainError);
}

TEST_CASE("layer gradients agree with central differences") {
    CHECK(gradcheck::h_swish(100, 1) < 1e-4);
    CHECK(gradcheck::h_sigmoid(100, 2) < 1e-4);
    CHECK(gradcheck::depthwise_separable(20, 3) < 1e-4);
    CHECK(gradcheck::se_block(20, 4) < 1e-4);
    CHECK(gradcheck::dense_softmax_xent(20, 5) < 1e-4);
}

TEST_CASE("whole-model backward agrees with central differences") {
    auto model = MobileMiniModel::create(ArchSpec::mobile_mini(20, 5), 3);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::vector<double> x(20);
    for (auto& v : x) v = g(rng);
    auto grads = zeros_like(model);
    backward(model, x, 2, grads);
    auto params = model.parameters();
    const auto gparams = grads.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto loss = [&] { return cross_entropy(forward(model, x), 2); };
        const auto num = gradcheck::numeric(*params[p].second, loss);
        CHECK_MESSAGE(gradcheck::array_error(*gparams[p].second, num) < 1e-4, params[p].first);
    }
}

TEST_CASE("MobileMini shape and size") {
    const auto m = MobileMiniModel::create(ArchSpec::mobile_mini(20, 5), 1);
    // stem 8*3+8, block1 8*3 + SE(2*8+2+8*2+8) + 16*8+16, block2 16*3 + 16*16+16, dense 5*16+5
    CHECK(m.parameter_count() == 32 + 24 + 42 + 144 + 48 + 272 + 85);
    CHECK(forward(m, std::vector<double>(20, 0.5)).size() == 5);
    CHECK_THROWS_AS(forward(m, std::vector<double>(17, 0.0)), ShapeError);
    ArchSpec bad = ArchSpec::mobile_mini(20, 5);
    bad.blocks.resize(1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("training") {
    std::vector<Example> toy{{{1.0, 0.5, 1.0, 0.5}, 0}, {{-1.0, -0.5, -1.0, -0.5}, 1}};
    const auto m0 = MobileMiniModel::create(ArchSpec::mobile_mini(4, 2), 4);
    SUBCASE("zero learning rate leaves the model unchanged") {
        TrainConfig cfg;
        cfg.learning_rate = 0.0;
        cfg.epochs = 5;
        CHECK(save_model_json(train(m0, toy, cfg).model) == save_model_json(m0));
    }
    SUBCASE("separable toy set converges") {
        TrainConfig cfg;
        cfg.epochs = 500;
        cfg.learning_rate = 0.2;
        auto m = m0;
        fit_standardization(m, toy);
        const auto r = train(m, toy, cfg);
        CHECK(r.loss_history.back() < 0.01);
    }
    SUBCASE("same seed gives identical weights") {
        TrainConfig cfg;
        cfg.epochs = 20;
        CHECK(save_model_json(train(m0, toy, cfg).model) == save_model_json(train(m0, toy, cfg).model));
    }
    SUBCASE("divergence is reported") {
        TrainConfig cfg;
        cfg.epochs = 50;
        cfg.learning_rate = 1e200;
        CHECK_THROWS_AS(train(m0, toy, cfg), TrainingError);
    }
}

TEST_CASE("model JSON round trip") {
    auto m = MobileMiniModel::create(ArchSpec::mobile_mini(17, 5), 9);
    m.input_mean.assign(17, 0.25);
    const auto text = save_model_json(m);
    const auto back = load_model_json(text);
    CHECK(save_model_json(back) == text);
    const std::vector<double> x(17, 1.0);
    CHECK(forward(back, x) == forward(m, x));
    CHECK_THROWS(load_model_json("{\"format\": \"other\"}"));
}
