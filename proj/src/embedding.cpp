#include "embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace ocean {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> row_tokens, std::size_t dim)
    : dim_(dim), tokens_(std::move(row_tokens)) {
    if (dim_ < 1) fail(ErrorCode::invalid_argument, "embedding: dim must be >= 1");
    input_.assign(tokens_.size() * dim_, 0.0f);
    for (std::size_t i = 0; i < tokens_.size(); ++i) row_index_[tokens_[i]] = i;
}

std::int64_t EmbeddingMatrix::row_of(const std::string& token) const {
    auto it = row_index_.find(token);
    return it == row_index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool EmbeddingMatrix::finite() const {
    for (float v : input_)
        if (!std::isfinite(v)) return false;
    for (float v : output_)
        if (!std::isfinite(v)) return false;
    return true;
}

void EmbeddingMatrix::save(const std::string& path, const std::string& provenance_json) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "embedding: cannot write " + path);
    if (!provenance_json.empty()) out << "# provenance " << provenance_json << "\n";
    out << tokens_.size() << ' ' << dim_ << "\n";
    out << std::setprecision(9);
    for (std::size_t r = 0; r < tokens_.size(); ++r) {
        out << tokens_[r];
        const float* v = input_row(r);
        for (std::size_t d = 0; d < dim_; ++d) out << ' ' << v[d];
        out << "\n";
    }
    if (!out) fail(ErrorCode::io, "embedding: write failed for " + path);
}

EmbeddingMatrix EmbeddingMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "embedding: cannot open " + path);
    std::string line;
    std::size_t rows = 0, dim = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream header(line);
        if (!(header >> rows >> dim) || rows == 0 || dim == 0)
            fail(ErrorCode::parse, "embedding: malformed 'V D' header in " + path);
        break;
    }
    if (rows == 0) fail(ErrorCode::parse, "embedding: missing header in " + path);

    std::vector<std::string> tokens(rows);
    std::vector<float> values(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            fail(ErrorCode::parse, "embedding: expected " + std::to_string(rows) +
                                       " rows, file ends at row " + std::to_string(r));
        std::istringstream row(line);
        if (!(row >> tokens[r]))
            fail(ErrorCode::parse, "embedding: empty row " + std::to_string(r));
        for (std::size_t d = 0; d < dim; ++d)
            if (!(row >> values[r * dim + d]))
                fail(ErrorCode::parse, "embedding: row " + std::to_string(r) +
                                           " has fewer than " + std::to_string(dim) + " values");
    }
    if (tokens[0] != Vocabulary::kUnkToken)
        fail(ErrorCode::parse, "embedding: first row must be UNK, got '" + tokens[0] + "'");

    EmbeddingMatrix emb(std::move(tokens), dim);
    emb.input_ = std::move(values);
    return emb;
}

std::vector<SkipGramPair> generate_pairs_w1(std::span<const std::int32_t> ids) {
    std::vector<SkipGramPair> pairs;
    const std::size_t n = ids.size();
    for (std::size_t t = 0; t < n; ++t) {
        if (ids[t] == Vocabulary::kUnkId) continue;
        if (t > 0 && ids[t - 1] != Vocabulary::kUnkId)
            pairs.push_back({ids[t], ids[t - 1]});
        if (t + 1 < n && ids[t + 1] != Vocabulary::kUnkId)
            pairs.push_back({ids[t], ids[t + 1]});
    }
    return pairs;
}

AdjectiveIndex::AdjectiveIndex(const Lexicon& lex, std::size_t vocab_size) {
    tokens_ = lex.sorted_keys();
    for (std::size_t i = 0; i < tokens_.size(); ++i)
        to_id_[tokens_[i]] = static_cast<std::int32_t>(vocab_size + 1 + i);
}

std::int64_t AdjectiveIndex::target_id(const std::string& adjective) const {
    auto it = to_id_.find(adjective);
    return it == to_id_.end() ? -1 : it->second;
}

std::vector<SkipGramPair> generate_pairs_adj_w2(const LabeledSentence& sentence,
                                                const Vocabulary& vocab,
                                                const AdjectiveIndex& adjectives) {
    std::vector<SkipGramPair> pairs;
    const std::size_t n = sentence.tokens.size();
    for (std::size_t pos : sentence.adjective_positions) {
        if (pos >= n)
            fail(ErrorCode::invalid_argument,
                 "skip-gram: adjective position " + std::to_string(pos) + " out of range");
        const std::int64_t target = adjectives.target_id(sentence.tokens[pos]);
        if (target < 0) continue; // token no longer a known adjective
        for (long off : {-2L, -1L, 1L, 2L}) {
            const long ctx = static_cast<long>(pos) + off;
            if (ctx < 0 || ctx >= static_cast<long>(n)) continue;
            const std::int32_t id = vocab.encode(sentence.tokens[static_cast<std::size_t>(ctx)]);
            if (id == Vocabulary::kUnkId) continue;
            pairs.push_back({static_cast<std::int32_t>(target), id});
        }
    }
    return pairs;
}

NoiseSampler::NoiseSampler(const Vocabulary& vocab) {
    const std::size_t k = vocab.size();
    if (k < 2)
        fail(ErrorCode::invalid_argument,
             "noise sampler: vocabulary must have at least 2 entries");
    cumulative.resize(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += std::pow(static_cast<double>(vocab.count(static_cast<std::int32_t>(i + 1))), 0.75);
        cumulative[i] = acc;
    }
    if (acc <= 0.0) fail(ErrorCode::invalid_argument, "noise sampler: all counts are zero");
}

std::int32_t NoiseSampler::draw(Rng& rng, std::int32_t exclude) const {
    const double total = cumulative.back();
    for (;;) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::int32_t id = static_cast<std::int32_t>(it - cumulative.begin()) + 1;
        if (id > static_cast<std::int32_t>(cumulative.size()))
            id = static_cast<std::int32_t>(cumulative.size());
        if (id != exclude) return id;
    }
}

namespace {

template <class T>
T stable_sigmoid(T x) {
    if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
    const T z = std::exp(x);
    return z / (T{1} + z);
}

// -log sigmoid(x) = softplus(-x), computed without overflow.
template <class T>
T neg_log_sigmoid(T x) {
    if (x >= T{0}) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

} // namespace

template <class T>
T negative_sampling_loss(const T* v_target, const T* v_context,
                         const T* const* v_negatives, std::size_t k, std::size_t dim,
                         T* g_target, T* g_context, T* const* g_negatives) {
    if (k < 1) fail(ErrorCode::invalid_argument, "negative sampling: k must be >= 1");
    auto dot = [dim](const T* a, const T* b) {
        T s{0};
        for (std::size_t d = 0; d < dim; ++d) s += a[d] * b[d];
        return s;
    };
    const T s_pos = dot(v_context, v_target);
    T loss = neg_log_sigmoid(s_pos);
    const T d_pos = stable_sigmoid(s_pos) - T{1}; // dL/ds_pos
    if (g_context)
        for (std::size_t d = 0; d < dim; ++d) g_context[d] += d_pos * v_target[d];
    if (g_target)
        for (std::size_t d = 0; d < dim; ++d) g_target[d] += d_pos * v_context[d];
    for (std::size_t j = 0; j < k; ++j) {
        const T s_neg = dot(v_negatives[j], v_target);
        loss += neg_log_sigmoid(-s_neg);
        const T d_neg = stable_sigmoid(s_neg); // dL/ds_neg
        if (g_negatives && g_negatives[j])
            for (std::size_t d = 0; d < dim; ++d) g_negatives[j][d] += d_neg * v_target[d];
        if (g_target)
            for (std::size_t d = 0; d < dim; ++d) g_target[d] += d_neg * v_negatives[j][d];
    }
    return loss;
}

template float negative_sampling_loss<float>(const float*, const float*, const float* const*,
                                             std::size_t, std::size_t, float*, float*,
                                             float* const*);
template double negative_sampling_loss<double>(const double*, const double*,
                                               const double* const*, std::size_t, std::size_t,
                                               double*, double*, double* const*);

EmbeddingMatrix train_skipgram(std::span<const LabeledSentence> corpus, const Vocabulary& vocab,
                               const Lexicon* lexicon, const EmbeddingConfig& cfg,
                               SkipGramTrainLog* log) {
    if (cfg.num_sampled < 1)
        fail(ErrorCode::invalid_argument, "skip-gram: num_sampled must be >= 1");
    if (cfg.learning_rate <= 0.0)
        fail(ErrorCode::invalid_argument, "skip-gram: learning rate must be > 0");
    if (cfg.window_mode == WindowMode::adjectives_w2 && lexicon == nullptr)
        fail(ErrorCode::invalid_argument, "skip-gram: adjective mode needs the lexicon");

    const std::size_t K = vocab.size();
    AdjectiveIndex adjectives;
    std::vector<std::string> row_tokens;
    row_tokens.reserve(K + 1);
    row_tokens.push_back(Vocabulary::kUnkToken);
    for (std::size_t i = 1; i <= K; ++i) row_tokens.push_back(vocab.decode(static_cast<std::int32_t>(i)));
    if (cfg.window_mode == WindowMode::adjectives_w2) {
        adjectives = AdjectiveIndex(*lexicon, K);
        for (const std::string& adj : adjectives.tokens()) row_tokens.push_back(adj);
    }

    std::vector<SkipGramPair> pairs;
    for (const LabeledSentence& s : corpus) {
        std::vector<SkipGramPair> p;
        if (cfg.window_mode == WindowMode::all_words_w1)
            p = generate_pairs_w1(vocab.encode(s.tokens));
        else
            p = generate_pairs_adj_w2(s, vocab, adjectives);
        pairs.insert(pairs.end(), p.begin(), p.end());
    }
    if (pairs.empty()) fail(ErrorCode::invalid_argument, "skip-gram: no training pairs");

    EmbeddingMatrix emb(std::move(row_tokens), cfg.dim);
    emb.resize_output(K + 1);
    Rng init_rng(cfg.seed);
    const double bound = 0.5 / static_cast<double>(cfg.dim);
    for (std::size_t r = 1; r < emb.input_rows(); ++r) { // row 0 stays zero (pad)
        float* v = emb.input_row(r);
        for (std::size_t d = 0; d < cfg.dim; ++d)
            v[d] = static_cast<float>(init_rng.uniform(-bound, bound));
    }
    for (std::size_t r = 1; r < emb.output_rows(); ++r) {
        float* v = emb.output_row(r);
        for (std::size_t d = 0; d < cfg.dim; ++d)
            v[d] = static_cast<float>(init_rng.uniform(-bound, bound));
    }

    NoiseSampler sampler(vocab);
    if (log) {
        log->epoch_loss.clear();
        log->pair_count = pairs.size();
    }

    const std::size_t dim = cfg.dim;
    std::vector<const float*> neg_rows(cfg.num_sampled);
    std::vector<std::int32_t> neg_ids(cfg.num_sampled);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng epoch_rng = Rng(cfg.seed).fork(epoch + 1);
        epoch_rng.shuffle(pairs);
        double epoch_loss = 0.0;
        std::size_t done = 0;
        while (done < pairs.size()) {
            const std::size_t batch = std::min(cfg.batch_size, pairs.size() - done);
            // Sparse gradient accumulation; ordered maps keep the update
            // sequence independent of hash layout.
            std::map<std::int32_t, std::vector<float>> g_in, g_out;
            auto grad_slot = [&](std::map<std::int32_t, std::vector<float>>& m,
                                 std::int32_t row) -> float* {
                auto [it, fresh] = m.try_emplace(row);
                if (fresh) it->second.assign(dim, 0.0f);
                return it->second.data();
            };
            for (std::size_t i = 0; i < batch; ++i) {
                const SkipGramPair pair = pairs[done + i];
                for (std::size_t j = 0; j < cfg.num_sampled; ++j) {
                    neg_ids[j] = sampler.draw(epoch_rng, pair.context);
                    neg_rows[j] = emb.output_row(static_cast<std::size_t>(neg_ids[j]));
                }
                std::vector<float*> g_negs(cfg.num_sampled);
                for (std::size_t j = 0; j < cfg.num_sampled; ++j)
                    g_negs[j] = grad_slot(g_out, neg_ids[j]);
                epoch_loss += negative_sampling_loss<float>(
                    emb.input_row(static_cast<std::size_t>(pair.target)),
                    emb.output_row(static_cast<std::size_t>(pair.context)), neg_rows.data(),
                    cfg.num_sampled, dim, grad_slot(g_in, pair.target),
                    grad_slot(g_out, pair.context), g_negs.data());
            }
            const float step =
                static_cast<float>(cfg.learning_rate / static_cast<double>(batch));
            for (const auto& [row, g] : g_in) {
                float* v = emb.input_row(static_cast<std::size_t>(row));
                for (std::size_t d = 0; d < dim; ++d) v[d] -= step * g[d];
            }
            for (const auto& [row, g] : g_out) {
                float* v = emb.output_row(static_cast<std::size_t>(row));
                for (std::size_t d = 0; d < dim; ++d) v[d] -= step * g[d];
            }
            done += batch;
        }
        if (log) log->epoch_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
    }
    return emb;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const std::string& word,
                                                              const EmbeddingMatrix& emb,
                                                              std::size_t k) {
    const std::int64_t query = emb.row_of(word);
    if (query <= 0)
        fail(ErrorCode::not_found, "nearest neighbors: unknown word '" + word + "'");
    const std::size_t dim = emb.dim();
    auto norm = [&](const float* v) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) s += static_cast<double>(v[d]) * v[d];
        return std::sqrt(s);
    };
    const float* q = emb.input_row(static_cast<std::size_t>(query));
    const double qn = norm(q);
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t r = 1; r < emb.input_rows(); ++r) {
        if (static_cast<std::int64_t>(r) == query) continue;
        const float* v = emb.input_row(r);
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += static_cast<double>(q[d]) * v[d];
        const double vn = norm(v);
        const double cosine = (qn > 0.0 && vn > 0.0) ? dot / (qn * vn) : 0.0;
        scored.emplace_back(emb.token(r), cosine);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

net::Tensor<float> embed_sentence(std::span<const std::int32_t> ids, const EmbeddingMatrix& emb,
                                  std::size_t max_len) {
    if (max_len < 1) fail(ErrorCode::invalid_argument, "embed_sentence: max_len must be >= 1");
    net::Tensor<float> out({max_len, emb.dim()});
    const std::size_t n = std::min(max_len, ids.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = static_cast<std::size_t>(ids[i]);
        if (id >= emb.input_rows())
            fail(ErrorCode::invalid_argument,
                 "embed_sentence: id " + std::to_string(ids[i]) + " out of range");
        const float* v = emb.input_row(id);
        std::copy(v, v + emb.dim(), out.data() + i * emb.dim());
    }
    return out;
}

} // namespace ocean
