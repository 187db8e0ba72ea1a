#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "net/layers.hpp"
#include "net/network.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace ocean;
using net::Padding;
using net::Tensor;

TEST_CASE("relu forward and backward") {
    net::ReluLayer<double> relu;
    Tensor<double> x({3}, {-1.0, 0.0, 2.0});
    Tensor<double> y = relu.forward(x, true);
    CHECK(y.storage() == std::vector<double>{0.0, 0.0, 2.0});

    Tensor<double> all_pos({3}, {0.5, 1.0, 3.0});
    CHECK(relu.forward(all_pos, true).storage() == all_pos.storage());

    Tensor<double> x2({2}, {-1.0, 2.0});
    relu.forward(x2, true);
    Tensor<double> up({2}, {5.0, 5.0});
    CHECK(relu.backward(up).storage() == std::vector<double>{0.0, 5.0});
}

TEST_CASE("relu and sigmoid are monotone") {
    net::ReluLayer<double> relu;
    net::SigmoidLayer<double> sig;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(-6.0, 6.0);
        const double b = rng.uniform(-6.0, 6.0);
        const double lo = std::min(a, b), hi = std::max(a, b);
        Tensor<double> t({2}, {lo, hi});
        auto r = relu.forward(t, false);
        CHECK(r[0] <= r[1]);
        auto s = sig.forward(t, false);
        CHECK(s[0] <= s[1]);
    }
}

TEST_CASE("sigmoid values and stability") {
    net::SigmoidLayer<double> sig;
    Tensor<double> x({3}, {0.0, 40.0, -40.0});
    Tensor<double> y = sig.forward(x, false);
    CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(y[1] - 1.0) < 1e-12);
    CHECK(y[2] > 0.0);
    CHECK(y[2] < 1e-12);

    // derivative at 0 is 0.25
    Tensor<double> zero({1}, {0.0});
    sig.forward(zero, false);
    Tensor<double> one({1}, {1.0});
    CHECK(sig.backward(one)[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("dense layer forward matches hand arithmetic") {
    Rng rng(1);
    net::DenseLayer<double> dense(2, 2, rng);
    dense.weight().value = Tensor<double>({2, 2}, {1.0, 0.0, 0.0, 1.0});
    dense.bias().value = Tensor<double>({2}, {0.0, 0.0});
    Tensor<double> x({1, 2}, {1.0, 2.0});
    CHECK(dense.forward(x, true).storage() == std::vector<double>{1.0, 2.0});

    dense.weight().value = Tensor<double>({2, 2}, {1.0, 2.0, 3.0, 4.0});
    dense.bias().value = Tensor<double>({2}, {1.0, 0.0});
    Tensor<double> ones({1, 2}, {1.0, 1.0});
    auto y = dense.forward(ones, true);
    CHECK(y.storage() == std::vector<double>{5.0, 6.0});

    Tensor<double> bad({1, 3}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(dense.forward(bad, true), Error);
}

TEST_CASE("conv2d hand-checked outputs") {
    // 3x3 ones, 2x2 ones kernel, stride 1, valid -> 2x2 of fours.
    {
        Rng rng(2);
        net::Conv2dLayer<double> conv(2, 2, 1, 1, 1, Padding::valid, rng);
        conv.kernel().value = Tensor<double>({2, 2, 1, 1}, std::vector<double>(4, 1.0));
        Tensor<double> x({1, 3, 3, 1}, std::vector<double>(9, 1.0));
        Tensor<double> y = conv.forward(x, true);
        CHECK(y.shape() == std::vector<std::size_t>{1, 2, 2, 1});
        for (std::size_t i = 0; i < y.numel(); ++i) CHECK(y[i] == doctest::Approx(4.0));
    }
    // 3x3 ones, 3x3 ones kernel, same padding: border sums shrink.
    {
        Rng rng(3);
        net::Conv2dLayer<double> conv(3, 3, 1, 1, 1, Padding::same, rng);
        conv.kernel().value = Tensor<double>({3, 3, 1, 1}, std::vector<double>(9, 1.0));
        Tensor<double> x({1, 3, 3, 1}, std::vector<double>(9, 1.0));
        Tensor<double> y = conv.forward(x, true);
        CHECK(y.shape() == std::vector<std::size_t>{1, 3, 3, 1});
        const std::vector<double> want{4, 6, 4, 6, 9, 6, 4, 6, 4};
        for (std::size_t i = 0; i < 9; ++i) CHECK(y[i] == doctest::Approx(want[i]));
    }
    // 1x1 kernel, same padding: scalar scaling.
    {
        Rng rng(4);
        net::Conv2dLayer<double> conv(1, 1, 1, 1, 1, Padding::same, rng);
        conv.kernel().value = Tensor<double>({1, 1, 1, 1}, {2.5});
        Tensor<double> x({1, 2, 2, 1}, {1.0, 2.0, 3.0, 4.0});
        Tensor<double> y = conv.forward(x, true);
        for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(2.5 * x[i]));
    }
    // Kernel larger than valid input rejected.
    {
        Rng rng(5);
        net::Conv2dLayer<double> conv(4, 4, 1, 1, 1, Padding::valid, rng);
        Tensor<double> x({1, 3, 3, 1}, std::vector<double>(9, 1.0));
        CHECK_THROWS_AS(conv.forward(x, true), Error);
    }
}

TEST_CASE("conv output shape law over random sizes") {
    Rng rng(6);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 1 + rng.below(12);
        const std::size_t k = 1 + rng.below(6);
        const std::size_t s = 1 + rng.below(3);
        CHECK(net::conv_out_dim(n, k, s, Padding::same) == (n + s - 1) / s);
        if (k <= n) {
            CHECK(net::conv_out_dim(n, k, s, Padding::valid) == (n - k) / s + 1);
        } else {
            CHECK_THROWS_AS(net::conv_out_dim(n, k, s, Padding::valid), Error);
        }
    }
}

TEST_CASE("maxpool forward, tie routing and backward") {
    net::MaxPool2dLayer<double> pool(2, 2, 2, Padding::valid);
    Tensor<double> x({1, 2, 2, 1}, {1.0, 2.0, 3.0, 4.0});
    Tensor<double> y = pool.forward(x, true);
    CHECK(y.shape() == std::vector<std::size_t>{1, 1, 1, 1});
    CHECK(y[0] == doctest::Approx(4.0));

    // Constant input: gradient routes to the first element of each window.
    Tensor<double> c({1, 2, 2, 1}, {7.0, 7.0, 7.0, 7.0});
    pool.forward(c, true);
    Tensor<double> up({1, 1, 1, 1}, {1.0});
    Tensor<double> dx = pool.backward(up);
    CHECK(dx.storage() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("batchnorm training statistics and affine recovery") {
    // Batch [1,2,3]: mean 2, population variance 2/3.
    net::BatchNormLayer<double> bn(1);
    Tensor<double> x({3, 1}, {1.0, 2.0, 3.0});
    Tensor<double> y = bn.forward(x, true);
    CHECK(y[0] == doctest::Approx(-1.22474).epsilon(1e-4));
    CHECK(y[1] == doctest::Approx(0.0));
    CHECK(y[2] == doctest::Approx(1.22474).epsilon(1e-4));

    // gamma = sqrt(var + eps), beta = mean reproduces the input.
    net::BatchNormLayer<double> bn2(1);
    bn2.params()[0]->value[0] = std::sqrt(2.0 / 3.0 + 1e-5);
    bn2.params()[1]->value[0] = 2.0;
    Tensor<double> y2 = bn2.forward(x, true);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y2[i] == doctest::Approx(x[i]).epsilon(1e-9));

    // Inference with unit running stats is the identity.
    net::BatchNormLayer<double> bn3(1);
    Tensor<double> y3 = bn3.forward(x, false);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y3[i] == doctest::Approx(x[i]).epsilon(1e-5));

    // Batch of one is rejected in training mode.
    net::BatchNormLayer<double> bn4(2);
    Tensor<double> single({1, 2}, {1.0, 2.0});
    CHECK_THROWS_AS(bn4.forward(single, true), Error);
    CHECK_NOTHROW(bn4.forward(single, false));
}

TEST_CASE("batchnorm normalizes each feature to zero mean unit variance") {
    Rng rng(8);
    net::BatchNormLayer<float> bn(4);
    Tensor<float> x = Tensor<float>::uniform({64, 4}, -3.0f, 5.0f, rng);
    Tensor<float> y = bn.forward(x, true);
    for (std::size_t f = 0; f < 4; ++f) {
        double mean = 0.0, var = 0.0;
        for (std::size_t b = 0; b < 64; ++b) mean += y.at2(b, f);
        mean /= 64.0;
        for (std::size_t b = 0; b < 64; ++b) {
            const double d = y.at2(b, f) - mean;
            var += d * d;
        }
        var /= 64.0;
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("batchnorm per-channel statistics for convolutional input") {
    net::BatchNormLayer<double> bn(2);
    // One sample, 2x2 spatial, 2 channels: stats pool over batch and space.
    Tensor<double> x({1, 2, 2, 2}, {1, 10, 2, 20, 3, 30, 4, 40});
    Tensor<double> y = bn.forward(x, true);
    for (std::size_t ch = 0; ch < 2; ++ch) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 4; ++i) mean += y[i * 2 + ch];
        CHECK(std::abs(mean) < 1e-9);
    }
}

TEST_CASE("network checkpoint round trip preserves weights and running stats") {
    test_util::TempDir dir("ckpt");
    Rng rng(9);
    net::Network<float> n;
    n.add_dense(4, 3, rng);
    n.add_batchnorm(3);
    n.add_relu();
    n.add_dense(3, 5, rng);

    Tensor<float> x = Tensor<float>::uniform({8, 4}, -1.0f, 1.0f, rng);
    n.forward(x, true); // populate running statistics
    Tensor<float> before = n.forward(x, false);

    nlohmann::json extra;
    extra["model_id"] = 99;
    n.save(dir.path("model"), extra);

    nlohmann::json manifest;
    net::Network<float> m = net::Network<float>::load(dir.path("model"), &manifest);
    CHECK(manifest["model_id"] == 99);
    Tensor<float> after = m.forward(x, false);
    REQUIRE(after.numel() == before.numel());
    for (std::size_t i = 0; i < after.numel(); ++i)
        CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-6));

    CHECK_THROWS_AS(net::Network<float>::load(dir.path("missing")), Error);
}
