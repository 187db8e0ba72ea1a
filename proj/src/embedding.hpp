#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "net/tensor.hpp"
#include "rng.hpp"
#include "vocab.hpp"

namespace ocean {

struct SkipGramPair {
    std::int32_t target = 0;
    std::int32_t context = 0;

    friend bool operator==(const SkipGramPair&, const SkipGramPair&) = default;
};

enum class WindowMode { all_words_w1, adjectives_w2 };

struct EmbeddingConfig {
    std::size_t dim = 40;
    std::size_t num_sampled = 20;
    WindowMode window_mode = WindowMode::all_words_w1;
    double learning_rate = 0.05;
    std::size_t epochs = 5;
    std::size_t batch_size = 256;
    std::uint64_t seed = 42;
};

// Input and output vector tables. Input row 0 is the frozen all-zero
// UNK/pad row; rows 1..K are vocabulary words, and in adjective-centered
// mode rows K+1..K+A hold the lexicon adjectives (sorted order). Output
// rows cover 0..K only; contexts are always vocabulary words.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> row_tokens, std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t input_rows() const { return tokens_.size(); }

    float* input_row(std::size_t r) { return input_.data() + r * dim_; }
    const float* input_row(std::size_t r) const { return input_.data() + r * dim_; }
    float* output_row(std::size_t r) { return output_.data() + r * dim_; }
    const float* output_row(std::size_t r) const { return output_.data() + r * dim_; }
    std::size_t output_rows() const { return output_.size() / std::max<std::size_t>(dim_, 1); }

    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& token(std::size_t r) const { return tokens_[r]; }

    // -1 when the token has no row.
    std::int64_t row_of(const std::string& token) const;

    void resize_output(std::size_t rows) { output_.assign(rows * dim_, 0.0f); }

    bool finite() const;

    // Text format: optional '#' comment lines, then `V D`, then one
    // `token v1 .. vD` row per input vector (UNK row first).
    void save(const std::string& path, const std::string& provenance_json = "") const;
    static EmbeddingMatrix load(const std::string& path);

private:
    std::size_t dim_ = 0;
    std::vector<std::string> tokens_;
    std::vector<float> input_;
    std::vector<float> output_;
    std::unordered_map<std::string, std::size_t> row_index_;
};

// Window-1 pairs: every in-vocabulary position is a target, its immediate
// in-vocabulary neighbours are contexts. UNK never appears on either side.
std::vector<SkipGramPair> generate_pairs_w1(std::span<const std::int32_t> ids);

// Maps lexicon adjectives onto the target ids K+1..K+A appended after the
// vocabulary, in sorted-key order.
class AdjectiveIndex {
public:
    AdjectiveIndex() = default;
    AdjectiveIndex(const Lexicon& lex, std::size_t vocab_size);

    std::size_t count() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // -1 when not an adjective.
    std::int64_t target_id(const std::string& adjective) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::int32_t> to_id_;
};

// Window-2 pairs centered on adjective occurrences only: up to the two
// in-vocabulary words on each side become contexts of the adjective's
// dedicated target id.
std::vector<SkipGramPair> generate_pairs_adj_w2(const LabeledSentence& sentence,
                                                const Vocabulary& vocab,
                                                const AdjectiveIndex& adjectives);

// Draws noise ids from the unigram^(3/4) distribution over ids 1..K,
// never returning the excluded (positive) id.
class NoiseSampler {
public:
    explicit NoiseSampler(const Vocabulary& vocab);

    std::int32_t draw(Rng& rng, std::int32_t exclude) const;

private:
    std::vector<double> cumulative; // over ids 1..K
};

// loss = -log s(v_c . v_t) - sum_j log s(-v_nj . v_t), gradients accumulated
// into the matching g_* buffers when provided. Shared by training (float)
// and the finite-difference oracle (double).
template <class T>
T negative_sampling_loss(const T* v_target, const T* v_context,
                         const T* const* v_negatives, std::size_t k, std::size_t dim,
                         T* g_target = nullptr, T* g_context = nullptr,
                         T* const* g_negatives = nullptr);

struct SkipGramTrainLog {
    std::vector<double> epoch_loss; // mean pair loss per epoch
    std::size_t pair_count = 0;
};

// SGD over shuffled pair minibatches; deterministic under cfg.seed. The
// adjective index is only consulted in adjectives_w2 mode.
EmbeddingMatrix train_skipgram(std::span<const LabeledSentence> corpus, const Vocabulary& vocab,
                               const Lexicon* lexicon, const EmbeddingConfig& cfg,
                               SkipGramTrainLog* log = nullptr);

// Top-k cosine neighbours over input vectors, excluding the query and UNK.
std::vector<std::pair<std::string, double>> nearest_neighbors(const std::string& word,
                                                              const EmbeddingMatrix& emb,
                                                              std::size_t k);

// [max_len x dim] sentence matrix: row i = input vector of ids[i]; short
// sentences pad with row 0, long ones truncate.
net::Tensor<float> embed_sentence(std::span<const std::int32_t> ids, const EmbeddingMatrix& emb,
                                  std::size_t max_len);

} // namespace ocean
