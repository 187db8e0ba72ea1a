#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "metrics.hpp"
#include "net/losses.hpp"
#include "rng.hpp"

using namespace ocean;

TEST_CASE("rmse_per_trait basic values") {
    // Perfect predictions.
    std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(rmse_per_trait(p, p) == std::array<double, 5>{0, 0, 0, 0, 0});

    // Constant 0.5 against balanced 0/1 labels: RMSE 0.5 on that trait.
    std::vector<double> pred, target;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 5; ++j) pred.push_back(0.5);
        for (int j = 0; j < 5; ++j) target.push_back(i % 2);
    }
    auto r = rmse_per_trait(pred, target);
    for (double v : r) CHECK(v == doctest::Approx(0.5));

    std::vector<double> short_target{0.0};
    CHECK_THROWS_AS(rmse_per_trait(p, short_target), Error);
}

TEST_CASE("rmse scales linearly with the errors") {
    Rng rng(40);
    std::vector<double> pred(20 * 5), target(20 * 5), doubled(20 * 5);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        target[i] = rng.uniform(-1.0, 1.0);
        const double err = rng.uniform(-0.5, 0.5);
        pred[i] = target[i] + err;
        doubled[i] = target[i] + 2.0 * err;
    }
    auto r1 = rmse_per_trait(pred, target);
    auto r2 = rmse_per_trait(doubled, target);
    for (std::size_t j = 0; j < 5; ++j) CHECK(r2[j] == doctest::Approx(2.0 * r1[j]).epsilon(1e-9));
}

TEST_CASE("rmse agrees with the engine's per-column MSE") {
    Rng rng(41);
    const std::size_t B = 16;
    std::vector<double> pred(B * 5), target(B * 5);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = rng.uniform(-1.0, 1.0);
        target[i] = rng.uniform(-1.0, 1.0);
    }
    auto r = rmse_per_trait(pred, target);
    for (std::size_t j = 0; j < 5; ++j) {
        net::Tensor<double> col_p({B, 1}), col_t({B, 1});
        for (std::size_t i = 0; i < B; ++i) {
            col_p[i] = pred[i * 5 + j];
            col_t[i] = target[i * 5 + j];
        }
        const double mse = net::mse_loss(col_p, col_t);
        CHECK(std::abs(r[j] - std::sqrt(mse)) < 1e-9);
    }
}

namespace {

std::vector<BinaryLabels> bits_from(const std::vector<std::array<int, 5>>& rows) {
    std::vector<BinaryLabels> out;
    for (const auto& r : rows) out.push_back({r});
    return out;
}

} // namespace

TEST_CASE("binary_metrics hand-checked confusion matrix") {
    // Trait 0 carries tp=40, fp=10, fn=20, tn=30; other traits are perfect.
    std::vector<std::array<int, 5>> pred, truth;
    auto push = [&](int p, int a, int count) {
        for (int i = 0; i < count; ++i) {
            pred.push_back({p, 0, 0, 0, 0});
            truth.push_back({a, 0, 0, 0, 0});
        }
    };
    push(1, 1, 40);
    push(1, 0, 10);
    push(0, 1, 20);
    push(0, 0, 30);
    auto m = binary_metrics(bits_from(pred), bits_from(truth));
    CHECK(m[0].cm.tp == 40);
    CHECK(m[0].cm.fp == 10);
    CHECK(m[0].cm.fn == 20);
    CHECK(m[0].cm.tn == 30);
    CHECK(m[0].cm.total() == 100);
    CHECK(m[0].accuracy == doctest::Approx(0.70).epsilon(1e-4));
    REQUIRE(m[0].precision.has_value());
    CHECK(*m[0].precision == doctest::Approx(0.80).epsilon(1e-4));
    REQUIRE(m[0].recall.has_value());
    CHECK(*m[0].recall == doctest::Approx(0.6667).epsilon(1e-3));
    CHECK(m[1].accuracy == doctest::Approx(1.0));
}

TEST_CASE("binary_metrics zero-denominator cases are absent, not zero") {
    // All-negative predictions with positives present: precision absent,
    // recall 0.
    std::vector<std::array<int, 5>> pred{{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
    std::vector<std::array<int, 5>> truth{{1, 0, 0, 0, 0}, {1, 0, 0, 0, 0}};
    auto m = binary_metrics(bits_from(pred), bits_from(truth));
    CHECK_FALSE(m[0].precision.has_value());
    REQUIRE(m[0].recall.has_value());
    CHECK(*m[0].recall == 0.0);
    // Trait with no positives anywhere: recall absent too.
    CHECK_FALSE(m[1].recall.has_value());

    std::vector<std::array<int, 5>> bad{{2, 0, 0, 0, 0}};
    CHECK_THROWS_AS(binary_metrics(bits_from(bad), bits_from(truth)), Error);
}

TEST_CASE("accuracy from the confusion matrix equals direct agreement counting") {
    Rng rng(42);
    std::vector<std::array<int, 5>> pred, truth;
    for (int i = 0; i < 200; ++i) {
        std::array<int, 5> p{}, a{};
        for (int j = 0; j < 5; ++j) {
            p[j] = rng.below(2) ? 1 : 0;
            a[j] = rng.below(2) ? 1 : 0;
        }
        pred.push_back(p);
        truth.push_back(a);
    }
    auto m = binary_metrics(bits_from(pred), bits_from(truth));
    for (std::size_t j = 0; j < 5; ++j) {
        std::size_t agree = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i][j] == truth[i][j]) ++agree;
        CHECK(m[j].accuracy == doctest::Approx(double(agree) / double(pred.size())).epsilon(1e-12));
    }
}

TEST_CASE("swapping the positive class swaps the confusion matrix consistently") {
    Rng rng(43);
    std::vector<std::array<int, 5>> pred, truth, ipred, itruth;
    for (int i = 0; i < 100; ++i) {
        std::array<int, 5> p{}, a{}, ip{}, ia{};
        for (int j = 0; j < 5; ++j) {
            p[j] = rng.below(2) ? 1 : 0;
            a[j] = rng.below(2) ? 1 : 0;
            ip[j] = 1 - p[j];
            ia[j] = 1 - a[j];
        }
        pred.push_back(p);
        truth.push_back(a);
        ipred.push_back(ip);
        itruth.push_back(ia);
    }
    auto m = binary_metrics(bits_from(pred), bits_from(truth));
    auto w = binary_metrics(bits_from(ipred), bits_from(itruth));
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(m[j].cm.tp == w[j].cm.tn);
        CHECK(m[j].cm.tn == w[j].cm.tp);
        CHECK(m[j].cm.fp == w[j].cm.fn);
        CHECK(m[j].cm.fn == w[j].cm.fp);
        CHECK(m[j].accuracy == doctest::Approx(w[j].accuracy));
    }
}

TEST_CASE("compare_report computes relative improvement per trait") {
    MetricsReport model;
    model.model = "model-7";
    model.split = "test";
    model.count = 50;
    model.rmse = {0.8, 0.8, 0.8, 0.8, 0.8};
    MetricsReport base = model;
    base.model = "model-0";
    base.rmse = {1.0, 1.0, 1.0, 1.0, 1.0};

    MetricsReport cmp = compare_report(model, base);
    REQUIRE(cmp.improvement.has_value());
    for (double i : *cmp.improvement) CHECK(i == doctest::Approx(0.2));

    MetricsReport same = compare_report(base, base);
    for (double i : *same.improvement) CHECK(i == doctest::Approx(0.0));

    MetricsReport other = base;
    other.count = 49;
    CHECK_THROWS_AS(compare_report(model, other), Error);

    auto j = cmp.to_json();
    CHECK(j["model"] == "model-7");
    CHECK(j["improvement"]["O"] == doctest::Approx(0.2));
    CHECK(!cmp.to_text_table().empty());
}
