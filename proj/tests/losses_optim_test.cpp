#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "net/losses.hpp"
#include "net/optim.hpp"
#include "rng.hpp"

using namespace ocean;
using net::Parameter;
using net::Tensor;

TEST_CASE("mse loss values and gradient") {
    Tensor<double> p({1, 2}, {1.0, 1.0});
    Tensor<double> t({1, 2}, {0.0, 0.0});
    Tensor<double> grad;
    CHECK(net::mse_loss(p, t, &grad) == doctest::Approx(1.0));
    CHECK(grad[0] == doctest::Approx(1.0)); // 2*(1-0)/2
    CHECK(net::mse_loss(p, p) == doctest::Approx(0.0));

    Tensor<double> wrong({2, 1}, {0.0, 0.0});
    CHECK_THROWS_AS(net::mse_loss(p, wrong), Error);
}

TEST_CASE("grouped softmax cross entropy anchors") {
    // Uniform logits: every group contributes ln 2.
    Tensor<double> logits({2, 10});
    std::vector<BinaryLabels> labels(2);
    CHECK(net::grouped_softmax_ce<double>(logits, labels) ==
          doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-9));

    // A saturated correct group contributes nearly nothing.
    Tensor<double> sat({1, 10});
    sat.at2(0, 0) = 20.0;
    sat.at2(0, 1) = -20.0;
    std::vector<BinaryLabels> l1(1);
    l1[0].bits = {0, 0, 0, 0, 0};
    const double loss = net::grouped_softmax_ce<double>(sat, l1);
    CHECK(loss == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-6));

    std::vector<BinaryLabels> bad(1);
    bad[0].bits = {0, 2, 0, 0, 0};
    CHECK_THROWS_AS(net::grouped_softmax_ce<double>(sat, bad), Error);
}

TEST_CASE("grouped softmax probabilities are normalized and shift invariant") {
    Rng rng(12);
    for (int iter = 0; iter < 25; ++iter) {
        Tensor<double> logits = Tensor<double>::uniform({3, 10}, -4.0, 4.0, rng);
        std::vector<BinaryLabels> labels(3);
        for (auto& l : labels)
            for (auto& b : l.bits) b = rng.below(2) ? 1 : 0;
        Tensor<double> probs;
        const double base = net::grouped_softmax_ce<double>(logits, labels, nullptr, &probs);
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t g = 0; g < 5; ++g) {
                const double p0 = probs.at2(b, 2 * g);
                const double p1 = probs.at2(b, 2 * g + 1);
                CHECK(p0 > 0.0);
                CHECK(p1 > 0.0);
                CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-6));
            }
        // Adding a constant to one group's logits leaves the loss unchanged.
        Tensor<double> shifted = logits;
        const std::size_t g = rng.below(5);
        const double c = rng.uniform(-3.0, 3.0);
        for (std::size_t b = 0; b < 3; ++b) {
            shifted.at2(b, 2 * g) += c;
            shifted.at2(b, 2 * g + 1) += c;
        }
        const double moved = net::grouped_softmax_ce<double>(shifted, labels);
        CHECK(std::abs(moved - base) < 1e-9);
    }
}

TEST_CASE("grouped CE is non-negative and uniform logits sit exactly on the floor") {
    Rng rng(13);
    for (int iter = 0; iter < 50; ++iter) {
        Tensor<double> logits = Tensor<double>::uniform({2, 10}, -8.0, 8.0, rng);
        std::vector<BinaryLabels> labels(2);
        for (auto& l : labels)
            for (auto& b : l.bits) b = rng.below(2) ? 1 : 0;
        CHECK(net::grouped_softmax_ce<double>(logits, labels) >= 0.0);
    }
    Tensor<double> uniform({3, 10});
    std::vector<BinaryLabels> labels(3);
    CHECK(std::abs(net::grouped_softmax_ce<double>(uniform, labels) - 5.0 * std::log(2.0)) <
          1e-6);
}

TEST_CASE("sgd step") {
    Parameter<double> p("w", Tensor<double>({1}, {1.0}));
    p.grad[0] = 2.0;
    std::vector<Parameter<double>*> params{&p};
    net::sgd_step<double>(params, 0.1);
    CHECK(p.value[0] == doctest::Approx(0.8));
    CHECK(p.grad[0] == 0.0);

    net::sgd_step<double>(params, 0.1); // zero gradient: no movement
    CHECK(p.value[0] == doctest::Approx(0.8));

    CHECK_THROWS_AS(net::sgd_step<double>(params, 0.0), Error);
    CHECK_THROWS_AS(net::sgd_step<double>(params, -1.0), Error);
}

TEST_CASE("two sgd steps equal one summed step only for equal gradients") {
    auto run_two = [](double g1, double g2) {
        Parameter<double> p("w", Tensor<double>({1}, {0.0}));
        std::vector<Parameter<double>*> params{&p};
        p.grad[0] = g1;
        net::sgd_step<double>(params, 0.5);
        p.grad[0] = g2;
        net::sgd_step<double>(params, 0.5);
        return p.value[0];
    };
    auto run_one = [](double g) {
        Parameter<double> p("w", Tensor<double>({1}, {0.0}));
        std::vector<Parameter<double>*> params{&p};
        p.grad[0] = g;
        net::sgd_step<double>(params, 0.5);
        return p.value[0];
    };
    // SGD is linear in the gradient, so the sequential identity holds in
    // general; the counterexample lives in Adagrad below.
    CHECK(run_two(1.0, 3.0) == doctest::Approx(run_one(4.0)));

    auto adagrad_two = [](double g1, double g2) {
        Parameter<double> p("w", Tensor<double>({1}, {0.0}));
        std::vector<Parameter<double>*> params{&p};
        p.grad[0] = g1;
        net::adagrad_step<double>(params, 0.5);
        p.grad[0] = g2;
        net::adagrad_step<double>(params, 0.5);
        return p.value[0];
    };
    auto adagrad_one = [](double g) {
        Parameter<double> p("w", Tensor<double>({1}, {0.0}));
        std::vector<Parameter<double>*> params{&p};
        p.grad[0] = g;
        net::adagrad_step<double>(params, 0.5);
        return p.value[0];
    };
    CHECK(adagrad_two(1.0, 1.0) != doctest::Approx(adagrad_one(2.0)));
    CHECK(std::abs(adagrad_two(1.0, 3.0) - adagrad_one(4.0)) > 1e-6);
}

TEST_CASE("adagrad first step and decay") {
    Parameter<double> p("w", Tensor<double>({1}, {1.0}));
    std::vector<Parameter<double>*> params{&p};
    p.grad[0] = 3.0;
    net::adagrad_step<double>(params, 0.1, 1e-8);
    CHECK(p.accum[0] == doctest::Approx(9.0));
    CHECK(p.value[0] == doctest::Approx(0.9).epsilon(1e-7));

    // Zero gradients forever: parameter and accumulator freeze.
    for (int i = 0; i < 5; ++i) {
        p.grad[0] = 0.0;
        net::adagrad_step<double>(params, 0.1, 1e-8);
    }
    CHECK(p.value[0] == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(p.accum[0] == doctest::Approx(9.0));

    CHECK_THROWS_AS(net::adagrad_step<double>(params, 0.0), Error);
}

TEST_CASE("adagrad update magnitudes shrink as 1/sqrt(t) under constant gradients") {
    Parameter<double> p("w", Tensor<double>({1}, {0.0}));
    std::vector<Parameter<double>*> params{&p};
    double prev_value = 0.0;
    double prev_step = 1e9;
    for (int t = 1; t <= 50; ++t) {
        p.grad[0] = 2.0;
        net::adagrad_step<double>(params, 0.1, 1e-12);
        const double step = std::abs(p.value[0] - prev_value);
        prev_value = p.value[0];
        CHECK(step < prev_step);
        // Closed form: eta * g / (g * sqrt(t)) = eta / sqrt(t).
        CHECK(step == doctest::Approx(0.1 / std::sqrt(double(t))).epsilon(1e-6));
        prev_step = step;
        CHECK(p.accum[0] == doctest::Approx(4.0 * t));
    }
}

TEST_CASE("adagrad accumulators never decrease") {
    Rng rng(77);
    Parameter<double> p("w", Tensor<double>({4}));
    std::vector<Parameter<double>*> params{&p};
    std::vector<double> prev(4, 0.0);
    for (int t = 0; t < 100; ++t) {
        for (std::size_t i = 0; i < 4; ++i) p.grad[i] = rng.uniform(-2.0, 2.0);
        net::adagrad_step<double>(params, 0.05);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(p.accum[i] >= prev[i]);
            prev[i] = p.accum[i];
        }
    }
}
