#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "embedding.hpp"
#include "net/network.hpp"
#include "vocab.hpp"

namespace ocean {

enum class Task { regression, classification };
enum class InputKind { bow, embedding1, embedding2, embedding3 };

const char* task_name(Task t);
const char* input_kind_name(InputKind k);

// One architecture row as transcribed from the source tables: hidden layers
// only; every dense/conv hidden layer is expanded to layer + batch norm +
// ReLU at build time, and the output projection is appended separately.
struct LayerDesc {
    enum class Kind { dense, conv, maxpool };
    Kind kind{};
    std::size_t width = 0;                         // dense
    std::size_t kh = 0, kw = 0, filters = 0;       // conv / maxpool window
    std::size_t stride = 1;
    net::Padding pad = net::Padding::valid;

    static LayerDesc dense(std::size_t width);
    static LayerDesc conv(std::size_t kh, std::size_t kw, std::size_t filters,
                          std::size_t stride, net::Padding pad);
    static LayerDesc maxpool(std::size_t kh, std::size_t kw, std::size_t stride,
                             net::Padding pad);
};

struct ModelSpec {
    int id = 0;
    Task task = Task::regression;
    InputKind input_kind = InputKind::bow;
    bool baseline = false; // model 0, the constant mean predictor
    std::vector<LayerDesc> layers;
    std::size_t output_units = 5;
    double learning_rate = 0.0;
};

// All 16 models (0..15) with their published hyperparameters.
const std::vector<ModelSpec>& catalog();
const ModelSpec& catalog_spec(int id);

struct EmbeddingParams {
    std::size_t dim = 0;
    std::size_t num_sampled = 0;
    WindowMode window_mode = WindowMode::all_words_w1;
};

// Embedding 1 = (40, 20) window-1; embeddings 2 and 3 = (250, 50),
// the third adjective-centered with window 2.
EmbeddingParams embedding_params(InputKind kind);

// Builds the runnable network for one spec given the per-sample feature
// shape ({V} for bag-of-words, {p, D, 1} for sentence matrices).
net::Network<float> build_network(const ModelSpec& spec,
                                  std::span<const std::size_t> sample_shape,
                                  std::uint64_t seed);

// Constant per-trait training-mean predictor.
class Model0 {
public:
    static Model0 fit(std::span<const TraitVector> train_labels);

    const TraitVector& mean() const { return mean_; }
    net::Tensor<float> predict(std::size_t batch) const;

private:
    TraitVector mean_;
};

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 128;
    std::uint64_t seed = 42;
    std::size_t eval_every = 1;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    // Per-trait RMSE for regression, per-trait accuracy for classification.
    std::array<double, TraitVector::kSize> per_trait{};
    double seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// Maps a labeled sentence onto one flat feature row.
struct FeatureExtractor {
    std::vector<std::size_t> sample_shape;
    std::function<void(const LabeledSentence&, float*)> fill;
};

FeatureExtractor make_bow_features(const Vocabulary& vocab);
FeatureExtractor make_embedding_features(const Vocabulary& vocab, const EmbeddingMatrix& emb,
                                         std::size_t max_len);

net::Tensor<float> assemble_features(std::span<const LabeledSentence> sentences,
                                     const FeatureExtractor& features);

// Adagrad at the spec's learning rate, evaluating on the test split every
// eval_every epochs. Deterministic under cfg.seed; aborts on non-finite loss.
std::pair<net::Network<float>, TrainHistory> train_model(const ModelSpec& spec,
                                                         const DatasetSplit& data,
                                                         const FeatureExtractor& features,
                                                         const TrainConfig& cfg);

struct Predictions {
    net::Tensor<float> values;        // [B,5] traits or [B,10] probabilities
    std::vector<BinaryLabels> bits;   // classification only, per-group argmax
};

Predictions predict(net::Network<float>& net, const net::Tensor<float>& features, Task task);

} // namespace ocean
