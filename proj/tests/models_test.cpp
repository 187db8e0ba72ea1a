#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "models.hpp"
#include "rng.hpp"

using namespace ocean;
using net::Padding;

TEST_CASE("catalog has 16 entries with the published hyperparameters") {
    const auto& models = catalog();
    REQUIRE(models.size() == 16);
    for (int i = 0; i < 16; ++i) CHECK(models[static_cast<std::size_t>(i)].id == i);

    CHECK(catalog_spec(0).baseline);
    CHECK(catalog_spec(0).output_units == 5);

    // Model 1: 300 -> 200 -> 5 at learning rate 0.001.
    const ModelSpec& m1 = catalog_spec(1);
    REQUIRE(m1.layers.size() == 2);
    CHECK(m1.layers[0].width == 300);
    CHECK(m1.layers[1].width == 200);
    CHECK(m1.output_units == 5);
    CHECK(m1.learning_rate == doctest::Approx(0.001));
    CHECK(m1.input_kind == InputKind::bow);

    // Model 3: 100 -> 50 -> 20 -> 5.
    const ModelSpec& m3 = catalog_spec(3);
    REQUIRE(m3.layers.size() == 3);
    CHECK(m3.layers[0].width == 100);
    CHECK(m3.layers[1].width == 50);
    CHECK(m3.layers[2].width == 20);

    // Model 4 conv1 = 10x5 with 10 filters.
    const ModelSpec& m4 = catalog_spec(4);
    CHECK(m4.layers[0].kind == LayerDesc::Kind::conv);
    CHECK(m4.layers[0].kh == 10);
    CHECK(m4.layers[0].kw == 5);
    CHECK(m4.layers[0].filters == 10);
    CHECK(m4.input_kind == InputKind::embedding1);

    // Model 7/8 learning rates from the table.
    CHECK(catalog_spec(7).learning_rate == doctest::Approx(0.0050));
    CHECK(catalog_spec(8).learning_rate == doctest::Approx(0.0001));

    // Model 13: classifier, lr 0.0005, 10 outputs, final conv valid.
    const ModelSpec& m13 = catalog_spec(13);
    CHECK(m13.task == Task::classification);
    CHECK(m13.learning_rate == doctest::Approx(0.0005));
    CHECK(m13.output_units == 10);
    CHECK(m13.layers.back().kind == LayerDesc::Kind::conv);
    CHECK(m13.layers.back().kh == 1);
    CHECK(m13.layers.back().kw == 16);
    CHECK(m13.layers.back().filters == 25);
    CHECK(m13.layers.back().pad == Padding::valid);

    CHECK_THROWS_AS(catalog_spec(16), Error);
    CHECK_THROWS_AS(catalog_spec(-1), Error);
}

TEST_CASE("embedding parameter presets") {
    CHECK(embedding_params(InputKind::embedding1).dim == 40);
    CHECK(embedding_params(InputKind::embedding1).num_sampled == 20);
    CHECK(embedding_params(InputKind::embedding2).dim == 250);
    CHECK(embedding_params(InputKind::embedding2).num_sampled == 50);
    CHECK(embedding_params(InputKind::embedding3).dim == 250);
    CHECK(embedding_params(InputKind::embedding3).window_mode == WindowMode::adjectives_w2);
    CHECK_THROWS_AS(embedding_params(InputKind::bow), Error);
}

TEST_CASE("catalog conv widths chain down the 250-wide sentence matrix") {
    // The stride-2 cascade halves widths 250 -> 125 -> 63 -> 32 -> 16 -> 1,
    // which is exactly where the table kernels get their widths.
    for (int id : {7, 9, 10, 11, 12, 13, 14, 15}) {
        const ModelSpec& m = catalog_spec(id);
        std::size_t w = 250;
        for (const LayerDesc& d : m.layers) {
            if (d.kind == LayerDesc::Kind::conv && d.pad == Padding::valid)
                CHECK(d.kw == w); // final valid conv spans the full width
            w = net::conv_out_dim(w, d.kw, d.stride, d.pad);
        }
        CHECK(w == 1);
    }
}

TEST_CASE("model 0 predicts the training mean") {
    std::vector<TraitVector> labels{{0, 0, 0, 0, 0}, {1, 1, 1, 1, 1}};
    Model0 m = Model0::fit(labels);
    CHECK(m.mean().o == doctest::Approx(0.5));
    auto pred = m.predict(3);
    CHECK(pred.shape() == std::vector<std::size_t>{3, 5});
    for (std::size_t i = 0; i < pred.numel(); ++i) CHECK(pred[i] == doctest::Approx(0.5f));

    std::vector<TraitVector> one{{0.3, -0.2, 0.1, 0.0, 0.9}};
    Model0 single = Model0::fit(one);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(single.mean()[j] == doctest::Approx(one[0][j]));

    const std::vector<TraitVector> none;
    CHECK_THROWS_AS(Model0::fit(none), Error);
}

TEST_CASE("model 0 training RMSE equals the population standard deviation") {
    Rng rng(2025);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        std::vector<TraitVector> labels(n);
        for (auto& t : labels)
            for (std::size_t j = 0; j < 5; ++j) t[j] = rng.uniform(-1.0, 1.0);
        Model0 m = Model0::fit(labels);
        for (std::size_t j = 0; j < 5; ++j) {
            double sq = 0.0;
            for (const auto& t : labels) {
                const double d = t[j] - m.mean()[j];
                sq += d * d;
            }
            const double rmse = std::sqrt(sq / double(n));
            // Brute-force population standard deviation.
            double mean = 0.0;
            for (const auto& t : labels) mean += t[j];
            mean /= double(n);
            double var = 0.0;
            for (const auto& t : labels) var += (t[j] - mean) * (t[j] - mean);
            const double stddev = std::sqrt(var / double(n));
            CHECK(std::abs(rmse - stddev) < 1e-9);
        }
    }
}

namespace {

// Deterministic synthetic sentences: token "posK"/"negK" decides trait K.
std::vector<LabeledSentence> synthetic_sentences(std::size_t n, Rng& rng) {
    std::vector<LabeledSentence> out;
    for (std::size_t i = 0; i < n; ++i) {
        LabeledSentence s;
        for (std::size_t t = 0; t < 5; ++t) {
            const bool pos = rng.below(2) == 0;
            s.tokens.push_back((pos ? "pos" : "neg") + std::to_string(t));
            s.traits[t] = pos ? 0.5 : -0.5;
            s.labels.bits[t] = pos ? 1 : 0;
        }
        s.tokens.push_back("filler" + std::to_string(rng.below(3)));
        s.adjective_positions = {0};
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

TEST_CASE("a small dense regressor overfits a tiny synthetic set") {
    Rng rng(3001);
    auto sentences = synthetic_sentences(32, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});

    ModelSpec spec = catalog_spec(3); // 100/50/20 dense stack
    spec.learning_rate = 0.05;        // desk-scale rate; catalog rate suits the full corpus

    DatasetSplit split;
    split.train = sentences;
    split.test = sentences;

    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 32;
    cfg.seed = 9;
    auto [netw, history] = train_model(spec, split, make_bow_features(vocab), cfg);
    REQUIRE(history.epochs.size() == 60);
    const double initial = history.epochs.front().train_loss;
    const double final_loss = history.epochs.back().train_loss;
    CHECK(final_loss < 0.01 * initial);
}

TEST_CASE("a catalog CNN overfits 32 synthetic sentences in 200 epochs") {
    // Model 4 on embedding-1 features. Its 18x18 valid conv needs the pooled
    // height >= 18, i.e. sentences at least 44 tokens long.
    Rng rng(3010);
    auto sentences = synthetic_sentences(32, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});

    EmbeddingMatrix emb(
        [&] {
            std::vector<std::string> tokens{"UNK"};
            for (std::size_t i = 1; i <= vocab.size(); ++i)
                tokens.push_back(vocab.decode(static_cast<std::int32_t>(i)));
            return tokens;
        }(),
        embedding_params(InputKind::embedding1).dim);
    Rng erng(3011);
    for (std::size_t r = 1; r < emb.input_rows(); ++r)
        for (std::size_t d = 0; d < emb.dim(); ++d)
            emb.input_row(r)[d] = static_cast<float>(erng.uniform(-0.5, 0.5));

    ModelSpec spec = catalog_spec(4);
    spec.learning_rate = 0.05; // desk-scale rate; the architecture is the subject

    DatasetSplit split;
    split.train = sentences;
    split.test = {sentences.begin(), sentences.begin() + 4};
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 32;
    cfg.seed = 19;
    cfg.eval_every = 200;
    auto [netw, history] =
        train_model(spec, split, make_embedding_features(vocab, emb, 44), cfg);
    REQUIRE(history.epochs.size() == 200);
    CHECK(history.epochs.back().train_loss < 0.01 * history.epochs.front().train_loss);
}

TEST_CASE("training is deterministic under a fixed seed") {
    Rng rng(3002);
    auto sentences = synthetic_sentences(48, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});
    ModelSpec spec = catalog_spec(3);
    spec.learning_rate = 0.02;
    DatasetSplit split;
    split.train = sentences;
    split.test = {sentences.begin(), sentences.begin() + 8};
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    cfg.seed = 77;
    auto [n1, h1] = train_model(spec, split, make_bow_features(vocab), cfg);
    auto [n2, h2] = train_model(spec, split, make_bow_features(vocab), cfg);
    REQUIRE(h1.epochs.size() == h2.epochs.size());
    for (std::size_t i = 0; i < h1.epochs.size(); ++i) {
        CHECK(h1.epochs[i].train_loss == h2.epochs[i].train_loss);
        CHECK(h1.epochs[i].test_loss == h2.epochs[i].test_loss);
    }
}

TEST_CASE("a model-3-shaped regressor beats model 0 on planted-signal data") {
    Rng rng(3020);
    auto sentences = synthetic_sentences(600, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});
    DatasetSplit split = split_dataset(sentences, 3021);

    ModelSpec spec = catalog_spec(3);
    spec.learning_rate = 0.05;
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 64;
    cfg.seed = 3022;
    FeatureExtractor features = make_bow_features(vocab);
    auto [netw, history] = train_model(spec, split, features, cfg);

    std::vector<TraitVector> train_labels;
    for (const auto& s : split.train) train_labels.push_back(s.traits);
    Model0 m0 = Model0::fit(train_labels);

    net::Tensor<float> fx = assemble_features(split.test, features);
    Predictions pred = predict(netw, fx, Task::regression);
    for (std::size_t j = 0; j < 5; ++j) {
        double model_sq = 0, base_sq = 0;
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            const double t = split.test[i].traits[j];
            model_sq += (pred.values.at2(i, j) - t) * (pred.values.at2(i, j) - t);
            base_sq += (m0.mean()[j] - t) * (m0.mean()[j] - t);
        }
        CHECK(std::sqrt(model_sq) < 0.8 * std::sqrt(base_sq));
    }
}

TEST_CASE("classification predictions use per-group argmax") {
    Rng rng(3003);
    net::Network<float> n;
    n.add_dense(4, 10, rng);
    // Force known logits: zero weights, bias pattern (+3,-3) per group except
    // group 1 flipped.
    auto params = n.params();
    std::fill(params[0]->value.storage().begin(), params[0]->value.storage().end(), 0.0f);
    for (std::size_t g = 0; g < 5; ++g) {
        params[1]->value[2 * g] = g == 1 ? -3.0f : 3.0f;
        params[1]->value[2 * g + 1] = g == 1 ? 3.0f : -3.0f;
    }
    net::Tensor<float> x({2, 4});
    Predictions p = predict(n, x, Task::classification);
    REQUIRE(p.bits.size() == 2);
    CHECK(p.bits[0].bits == std::array<int, 5>{0, 1, 0, 0, 0});
    CHECK(p.values.shape() == std::vector<std::size_t>{2, 10});
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t g = 0; g < 5; ++g)
            CHECK(p.values.at2(b, 2 * g) + p.values.at2(b, 2 * g + 1) ==
                  doctest::Approx(1.0f).epsilon(1e-5));

    // Shifting both logits of a group never changes the predicted bits.
    for (std::size_t g = 0; g < 5; ++g) {
        params[1]->value[2 * g] += 7.5f;
        params[1]->value[2 * g + 1] += 7.5f;
    }
    Predictions q = predict(n, x, Task::classification);
    CHECK(q.bits[0].bits == p.bits[0].bits);
}

TEST_CASE("inference accepts a batch of one through batch norm") {
    Rng rng(3004);
    auto sentences = synthetic_sentences(16, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});
    ModelSpec spec = catalog_spec(3);
    spec.learning_rate = 0.02;
    DatasetSplit split;
    split.train = sentences;
    split.test = sentences;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 8;
    cfg.seed = 5;
    auto [netw, history] = train_model(spec, split, make_bow_features(vocab), cfg);

    FeatureExtractor fx = make_bow_features(vocab);
    net::Tensor<float> one = assemble_features({sentences.data(), 1}, fx);
    Predictions p = predict(netw, one, Task::regression);
    CHECK(p.values.shape() == std::vector<std::size_t>{1, 5});
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::isfinite(p.values[i]));
}

TEST_CASE("train_model rejects mismatched configs") {
    Rng rng(3005);
    auto sentences = synthetic_sentences(12, rng);
    Vocabulary vocab = Vocabulary::build(sentences, 100, Lexicon{});
    DatasetSplit split;
    split.train = sentences;
    split.test = sentences;
    TrainConfig cfg;

    CHECK_THROWS_AS(train_model(catalog_spec(0), split, make_bow_features(vocab), cfg), Error);

    ModelSpec conv_on_flat = catalog_spec(7);
    CHECK_THROWS_AS(train_model(conv_on_flat, split, make_bow_features(vocab), cfg), Error);

    DatasetSplit empty;
    CHECK_THROWS_AS(train_model(catalog_spec(3), empty, make_bow_features(vocab), cfg), Error);
}
