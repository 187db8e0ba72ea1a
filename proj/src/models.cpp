#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "net/losses.hpp"
#include "net/optim.hpp"
#include "rng.hpp"

namespace ocean {

const char* task_name(Task t) {
    return t == Task::regression ? "regression" : "classification";
}

const char* input_kind_name(InputKind k) {
    switch (k) {
        case InputKind::bow: return "bow";
        case InputKind::embedding1: return "embedding1";
        case InputKind::embedding2: return "embedding2";
        case InputKind::embedding3: return "embedding3";
    }
    return "?";
}

LayerDesc LayerDesc::dense(std::size_t width) {
    LayerDesc d;
    d.kind = Kind::dense;
    d.width = width;
    return d;
}

LayerDesc LayerDesc::conv(std::size_t kh, std::size_t kw, std::size_t filters,
                          std::size_t stride, net::Padding pad) {
    LayerDesc d;
    d.kind = Kind::conv;
    d.kh = kh;
    d.kw = kw;
    d.filters = filters;
    d.stride = stride;
    d.pad = pad;
    return d;
}

LayerDesc LayerDesc::maxpool(std::size_t kh, std::size_t kw, std::size_t stride,
                             net::Padding pad) {
    LayerDesc d;
    d.kind = Kind::maxpool;
    d.kh = kh;
    d.kw = kw;
    d.stride = stride;
    d.pad = pad;
    return d;
}

namespace {

using net::Padding;

std::vector<ModelSpec> make_catalog() {
    std::vector<ModelSpec> models;
    auto add = [&](ModelSpec spec) { models.push_back(std::move(spec)); };

    // Model 0: constant training-mean predictor.
    {
        ModelSpec m;
        m.id = 0;
        m.task = Task::regression;
        m.input_kind = InputKind::bow;
        m.baseline = true;
        m.output_units = 5;
        m.learning_rate = 0.0;
        add(std::move(m));
    }

    // Experiment 1: bag-of-words, fully-connected, MSE, Adagrad 0.001.
    auto dense_model = [&](int id, std::initializer_list<std::size_t> widths) {
        ModelSpec m;
        m.id = id;
        m.task = Task::regression;
        m.input_kind = InputKind::bow;
        for (std::size_t w : widths) m.layers.push_back(LayerDesc::dense(w));
        m.output_units = 5;
        m.learning_rate = 0.001;
        add(std::move(m));
    };
    dense_model(1, {300, 200});
    dense_model(2, {300, 200, 100});
    dense_model(3, {100, 50, 20});

    // Experiment 2, embedding 1 (40-dim).
    {
        ModelSpec m;
        m.id = 4;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding1;
        m.layers = {LayerDesc::conv(10, 5, 10, 1, Padding::valid),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(18, 18, 10, 1, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.0010;
        add(std::move(m));
    }
    {
        ModelSpec m;
        m.id = 5;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding1;
        m.layers = {LayerDesc::conv(5, 5, 150, 1, Padding::same),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(5, 20, 100, 1, Padding::same),
                    LayerDesc::conv(1, 20, 50, 1, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.0001;
        add(std::move(m));
    }
    {
        ModelSpec m;
        m.id = 6;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding1;
        m.layers = {LayerDesc::conv(3, 3, 100, 1, Padding::same),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(3, 20, 75, 1, Padding::same),
                    LayerDesc::conv(1, 20, 50, 1, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.0050;
        add(std::move(m));
    }

    // Experiment 2, embedding 2 (250-dim).
    {
        ModelSpec m;
        m.id = 7;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding2;
        m.layers = {LayerDesc::conv(3, 3, 100, 2, Padding::same),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(3, 63, 75, 2, Padding::same),
                    LayerDesc::conv(1, 32, 50, 2, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.0050;
        add(std::move(m));
    }
    {
        ModelSpec m;
        m.id = 8;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding2;
        m.layers = {LayerDesc::dense(100), LayerDesc::dense(50), LayerDesc::dense(20)};
        m.output_units = 5;
        m.learning_rate = 0.0001;
        add(std::move(m));
    }

    // Experiment 3, adjective-centered embedding 3 (250-dim).
    {
        ModelSpec m;
        m.id = 9;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding3;
        m.layers = {LayerDesc::conv(7, 5, 100, 2, Padding::same),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(5, 63, 75, 2, Padding::same),
                    LayerDesc::conv(3, 32, 50, 2, Padding::same),
                    LayerDesc::conv(1, 16, 25, 2, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.0005;
        add(std::move(m));
    }
    {
        ModelSpec m;
        m.id = 10;
        m.task = Task::regression;
        m.input_kind = InputKind::embedding3;
        m.layers = {LayerDesc::conv(3, 3, 100, 2, Padding::same),
                    LayerDesc::maxpool(4, 4, 2, Padding::same),
                    LayerDesc::conv(3, 63, 75, 2, Padding::same),
                    LayerDesc::conv(1, 32, 50, 2, Padding::valid)};
        m.output_units = 5;
        m.learning_rate = 0.005;
        add(std::move(m));
    }

    // Experiment 4: multi-label binary classification, 10 output units,
    // stride 2 + same padding everywhere except the final valid conv.
    auto classifier = [&](int id, InputKind input, std::vector<LayerDesc> layers, double lr) {
        ModelSpec m;
        m.id = id;
        m.task = Task::classification;
        m.input_kind = input;
        m.layers = std::move(layers);
        m.output_units = 10;
        m.learning_rate = lr;
        add(std::move(m));
    };
    classifier(11, InputKind::embedding2,
               {LayerDesc::conv(3, 3, 100, 2, Padding::same),
                LayerDesc::maxpool(4, 4, 2, Padding::same),
                LayerDesc::conv(3, 63, 75, 2, Padding::same),
                LayerDesc::conv(1, 32, 50, 2, Padding::valid)},
               0.0001);
    classifier(12, InputKind::embedding2,
               {LayerDesc::conv(5, 3, 100, 2, Padding::same),
                LayerDesc::maxpool(4, 4, 2, Padding::same),
                LayerDesc::conv(3, 63, 75, 2, Padding::same),
                LayerDesc::conv(1, 32, 50, 2, Padding::same),
                LayerDesc::conv(1, 16, 25, 2, Padding::valid)},
               0.0005);
    classifier(13, InputKind::embedding2,
               {LayerDesc::conv(7, 5, 100, 2, Padding::same),
                LayerDesc::maxpool(4, 4, 2, Padding::same),
                LayerDesc::conv(5, 63, 75, 2, Padding::same),
                LayerDesc::conv(3, 32, 50, 2, Padding::same),
                LayerDesc::conv(1, 16, 25, 2, Padding::valid)},
               0.0005);
    classifier(14, InputKind::embedding3,
               {LayerDesc::conv(7, 5, 100, 2, Padding::same),
                LayerDesc::maxpool(4, 4, 2, Padding::same),
                LayerDesc::conv(5, 63, 75, 2, Padding::same),
                LayerDesc::conv(3, 32, 50, 2, Padding::same),
                LayerDesc::conv(1, 16, 25, 2, Padding::valid)},
               0.0005);
    classifier(15, InputKind::embedding3,
               {LayerDesc::conv(7, 5, 100, 2, Padding::same),
                LayerDesc::maxpool(4, 4, 2, Padding::same),
                LayerDesc::conv(5, 63, 75, 2, Padding::same),
                LayerDesc::conv(3, 32, 50, 2, Padding::same),
                LayerDesc::conv(3, 16, 25, 2, Padding::same),
                LayerDesc::conv(1, 8, 16, 2, Padding::valid)},
               0.0005);

    return models;
}

} // namespace

const std::vector<ModelSpec>& catalog() {
    static const std::vector<ModelSpec> models = make_catalog();
    return models;
}

const ModelSpec& catalog_spec(int id) {
    const auto& models = catalog();
    if (id < 0 || static_cast<std::size_t>(id) >= models.size())
        fail(ErrorCode::invalid_argument, "catalog: no model " + std::to_string(id));
    return models[static_cast<std::size_t>(id)];
}

EmbeddingParams embedding_params(InputKind kind) {
    switch (kind) {
        case InputKind::embedding1: return {40, 20, WindowMode::all_words_w1};
        case InputKind::embedding2: return {250, 50, WindowMode::all_words_w1};
        case InputKind::embedding3: return {250, 50, WindowMode::adjectives_w2};
        case InputKind::bow: break;
    }
    fail(ErrorCode::invalid_argument, "embedding_params: bag-of-words input has no embedding");
}

net::Network<float> build_network(const ModelSpec& spec,
                                  std::span<const std::size_t> sample_shape,
                                  std::uint64_t seed) {
    if (spec.baseline)
        fail(ErrorCode::invalid_argument, "build_network: model 0 is not a network");
    Rng rng(seed);
    net::Network<float> netw;

    bool spatial = sample_shape.size() == 3; // {H, W, C}
    std::size_t H = spatial ? sample_shape[0] : 0;
    std::size_t W = spatial ? sample_shape[1] : 0;
    std::size_t C = spatial ? sample_shape[2] : 0;
    std::size_t flat = 1;
    for (std::size_t d : sample_shape) flat *= d;

    for (const LayerDesc& d : spec.layers) {
        switch (d.kind) {
            case LayerDesc::Kind::dense:
                netw.add_dense(flat, d.width, rng);
                netw.add_batchnorm(d.width);
                netw.add_relu();
                flat = d.width;
                spatial = false;
                break;
            case LayerDesc::Kind::conv: {
                if (!spatial)
                    fail(ErrorCode::invalid_argument,
                         "build_network: conv layer needs a spatial input, model " +
                             std::to_string(spec.id));
                netw.add_conv(d.kh, d.kw, C, d.filters, d.stride, d.pad, rng);
                netw.add_batchnorm(d.filters);
                netw.add_relu();
                H = net::conv_out_dim(H, d.kh, d.stride, d.pad);
                W = net::conv_out_dim(W, d.kw, d.stride, d.pad);
                C = d.filters;
                flat = H * W * C;
                break;
            }
            case LayerDesc::Kind::maxpool: {
                if (!spatial)
                    fail(ErrorCode::invalid_argument,
                         "build_network: maxpool needs a spatial input, model " +
                             std::to_string(spec.id));
                netw.add_maxpool(d.kh, d.kw, d.stride, d.pad);
                H = net::conv_out_dim(H, d.kh, d.stride, d.pad);
                W = net::conv_out_dim(W, d.kw, d.stride, d.pad);
                flat = H * W * C;
                break;
            }
        }
    }
    netw.add_dense(flat, spec.output_units, rng);
    return netw;
}

Model0 Model0::fit(std::span<const TraitVector> train_labels) {
    if (train_labels.empty())
        fail(ErrorCode::invalid_argument, "model 0: empty training labels");
    Model0 m;
    for (const TraitVector& t : train_labels)
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) m.mean_[i] += t[i];
    for (std::size_t i = 0; i < TraitVector::kSize; ++i)
        m.mean_[i] /= static_cast<double>(train_labels.size());
    return m;
}

net::Tensor<float> Model0::predict(std::size_t batch) const {
    net::Tensor<float> out({batch, TraitVector::kSize});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            out.at2(b, i) = static_cast<float>(mean_[i]);
    return out;
}

FeatureExtractor make_bow_features(const Vocabulary& vocab) {
    FeatureExtractor f;
    const std::size_t V = vocab.size();
    if (V == 0) fail(ErrorCode::invalid_argument, "bow features: empty vocabulary");
    f.sample_shape = {V};
    f.fill = [&vocab, V](const LabeledSentence& s, float* out) {
        std::fill(out, out + V, 0.0f);
        for (const std::string& tok : s.tokens) {
            const std::int32_t id = vocab.encode(tok);
            if (id != Vocabulary::kUnkId) out[static_cast<std::size_t>(id) - 1] = 1.0f;
        }
    };
    return f;
}

FeatureExtractor make_embedding_features(const Vocabulary& vocab, const EmbeddingMatrix& emb,
                                         std::size_t max_len) {
    FeatureExtractor f;
    f.sample_shape = {max_len, emb.dim(), 1};
    f.fill = [&vocab, &emb, max_len](const LabeledSentence& s, float* out) {
        const auto ids = vocab.encode(s.tokens);
        net::Tensor<float> m = embed_sentence(ids, emb, max_len);
        std::copy(m.data(), m.data() + m.numel(), out);
    };
    return f;
}

net::Tensor<float> assemble_features(std::span<const LabeledSentence> sentences,
                                     const FeatureExtractor& features) {
    std::vector<std::size_t> shape;
    shape.push_back(sentences.size());
    for (std::size_t d : features.sample_shape) shape.push_back(d);
    net::Tensor<float> out(shape);
    std::size_t row = net::Tensor<float>::numel_of(features.sample_shape);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        features.fill(sentences[i], out.data() + i * row);
    return out;
}

namespace {

net::Tensor<float> slice_rows(const net::Tensor<float>& all, std::span<const std::size_t> idx,
                              std::size_t row_elems) {
    std::vector<std::size_t> shape = all.shape();
    shape[0] = idx.size();
    net::Tensor<float> out(shape);
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(all.data() + idx[i] * row_elems, all.data() + (idx[i] + 1) * row_elems,
                  out.data() + i * row_elems);
    return out;
}

net::Tensor<float> regression_targets(std::span<const LabeledSentence> sentences) {
    net::Tensor<float> t({sentences.size(), TraitVector::kSize});
    for (std::size_t i = 0; i < sentences.size(); ++i)
        for (std::size_t j = 0; j < TraitVector::kSize; ++j)
            t.at2(i, j) = static_cast<float>(sentences[i].traits[j]);
    return t;
}

struct EvalOutcome {
    double loss = 0.0;
    std::array<double, TraitVector::kSize> per_trait{};
};

EvalOutcome evaluate(net::Network<float>& netw, const ModelSpec& spec,
                     const net::Tensor<float>& features,
                     std::span<const LabeledSentence> sentences) {
    const std::size_t n = sentences.size();
    const std::size_t row = features.numel() / std::max<std::size_t>(n, 1);
    EvalOutcome out;
    if (n == 0) return out;
    constexpr std::size_t kEvalBatch = 256;
    std::vector<double> sq_err(TraitVector::kSize, 0.0);
    std::vector<std::size_t> correct(TraitVector::kSize, 0);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += kEvalBatch) {
        const std::size_t count = std::min(kEvalBatch, n - start);
        std::vector<std::size_t> idx(count);
        std::iota(idx.begin(), idx.end(), start);
        net::Tensor<float> batch = slice_rows(features, idx, row);
        net::Tensor<float> y = netw.forward(batch, /*training=*/false);
        if (spec.task == Task::regression) {
            net::Tensor<float> target({count, TraitVector::kSize});
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = 0; j < TraitVector::kSize; ++j)
                    target.at2(i, j) = static_cast<float>(sentences[start + i].traits[j]);
            loss_sum += static_cast<double>(net::mse_loss(y, target)) *
                        static_cast<double>(count);
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = 0; j < TraitVector::kSize; ++j) {
                    const double d = static_cast<double>(y.at2(i, j)) -
                                     sentences[start + i].traits[j];
                    sq_err[j] += d * d;
                }
        } else {
            std::vector<BinaryLabels> labels(count);
            for (std::size_t i = 0; i < count; ++i) labels[i] = sentences[start + i].labels;
            loss_sum += static_cast<double>(net::grouped_softmax_ce<float>(y, labels)) *
                        static_cast<double>(count);
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t g = 0; g < TraitVector::kSize; ++g) {
                    const int bit = y.at2(i, 2 * g + 1) > y.at2(i, 2 * g) ? 1 : 0;
                    if (bit == sentences[start + i].labels.bits[g]) ++correct[g];
                }
        }
    }
    out.loss = loss_sum / static_cast<double>(n);
    for (std::size_t j = 0; j < TraitVector::kSize; ++j)
        out.per_trait[j] = spec.task == Task::regression
                               ? std::sqrt(sq_err[j] / static_cast<double>(n))
                               : static_cast<double>(correct[j]) / static_cast<double>(n);
    return out;
}

} // namespace

std::pair<net::Network<float>, TrainHistory> train_model(const ModelSpec& spec,
                                                         const DatasetSplit& data,
                                                         const FeatureExtractor& features,
                                                         const TrainConfig& cfg) {
    if (spec.baseline)
        fail(ErrorCode::invalid_argument, "train_model: model 0 needs no training");
    if (cfg.epochs < 1) fail(ErrorCode::invalid_argument, "train: epochs must be >= 1");
    if (data.train.empty()) fail(ErrorCode::invalid_argument, "train: empty training split");

    net::Network<float> netw = build_network(spec, features.sample_shape, cfg.seed);
    net::Tensor<float> train_x = assemble_features(data.train, features);
    net::Tensor<float> test_x = assemble_features(data.test, features);
    net::Tensor<float> train_y = regression_targets(data.train);

    const std::size_t n = data.train.size();
    const std::size_t row = train_x.numel() / n;
    const std::size_t batch_size = std::min<std::size_t>(cfg.batch_size, n);
    if (batch_size < 2)
        fail(ErrorCode::invalid_argument, "train: batch size must be >= 2 for batch norm");
    const auto lr = static_cast<float>(spec.learning_rate);

    auto params = netw.params();
    TrainHistory history;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng rng = Rng(cfg.seed).fork(epoch + 1);
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        // Partial trailing batch is dropped to keep batch-norm statistics stable.
        for (std::size_t start = 0; start + batch_size <= n; start += batch_size) {
            std::span<const std::size_t> idx(order.data() + start, batch_size);
            net::Tensor<float> bx = slice_rows(train_x, idx, row);
            net::Tensor<float> y = netw.forward(bx, /*training=*/true);
            net::Tensor<float> dloss;
            float loss = 0.0f;
            if (spec.task == Task::regression) {
                net::Tensor<float> ty({batch_size, TraitVector::kSize});
                for (std::size_t i = 0; i < batch_size; ++i)
                    std::copy(train_y.data() + idx[i] * TraitVector::kSize,
                              train_y.data() + (idx[i] + 1) * TraitVector::kSize,
                              ty.data() + i * TraitVector::kSize);
                loss = net::mse_loss(y, ty, &dloss);
            } else {
                std::vector<BinaryLabels> labels(batch_size);
                for (std::size_t i = 0; i < batch_size; ++i)
                    labels[i] = data.train[idx[i]].labels;
                loss = net::grouped_softmax_ce<float>(y, labels, &dloss);
            }
            if (!std::isfinite(loss))
                fail(ErrorCode::internal,
                     "train: non-finite loss in epoch " + std::to_string(epoch + 1) +
                         " (model " + std::to_string(spec.id) + ", lr " +
                         std::to_string(spec.learning_rate) + ")");
            netw.backward(dloss);
            net::adagrad_step<float>(params, lr);
            loss_sum += static_cast<double>(loss) * static_cast<double>(batch_size);
            seen += batch_size;
        }

        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
        if (cfg.eval_every > 0 && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs)) {
            EvalOutcome ev = evaluate(netw, spec, test_x, data.test);
            rec.test_loss = ev.loss;
            rec.per_trait = ev.per_trait;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.epochs.push_back(rec);
    }
    return {std::move(netw), std::move(history)};
}

Predictions predict(net::Network<float>& netw, const net::Tensor<float>& features, Task task) {
    Predictions out;
    if (task == Task::regression) {
        out.values = netw.forward(features, /*training=*/false);
        return out;
    }
    net::Tensor<float> logits = netw.forward(features, /*training=*/false);
    if (logits.rank() != 2 || logits.dim(1) != 2 * TraitVector::kSize)
        fail(ErrorCode::invalid_argument,
             "predict: classifier must emit [batch, 10] logits, got " + logits.shape_str());
    const std::size_t batch = logits.dim(0);
    std::vector<BinaryLabels> dummy(batch); // all-zero labels; probabilities only
    net::Tensor<float> probs;
    net::grouped_softmax_ce<float>(logits, dummy, nullptr, &probs);
    out.values = probs;
    out.bits.resize(batch);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t g = 0; g < TraitVector::kSize; ++g)
            out.bits[b].bits[g] = logits.at2(b, 2 * g + 1) > logits.at2(b, 2 * g) ? 1 : 0;
    return out;
}

} // namespace ocean
