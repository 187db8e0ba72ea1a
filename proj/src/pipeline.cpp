#include "pipeline.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

#include "corpus.hpp"
#include "embedding.hpp"
#include "error.hpp"
#include "hash.hpp"
#include "lexicon.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "net/gradcheck.hpp"
#include "net/losses.hpp"
#include "text.hpp"
#include "version.hpp"
#include "vocab.hpp"

namespace ocean::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig::RunConfig(json doc) : doc_(std::move(doc)) {
    if (!doc_.is_object()) fail(ErrorCode::invalid_argument, "config: document must be an object");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "config: cannot open " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::parse, "config: invalid JSON in " + path);
    return RunConfig(std::move(doc));
}

std::uint64_t RunConfig::seed() const { return get<std::uint64_t>("/seed", 42); }

std::string RunConfig::path(const std::string& key) const {
    return get<std::string>("/paths/" + key, "");
}

std::string RunConfig::require_path(const std::string& key) const {
    const std::string p = path(key);
    if (p.empty())
        fail(ErrorCode::invalid_argument, "config: missing required key paths." + key);
    if (!fs::exists(p))
        fail(ErrorCode::not_found, "missing input for paths." + key + ": " + p);
    return p;
}

void RunConfig::override_key(const std::string& dotted_key, const std::string& value) {
    std::string pointer = "/";
    for (char c : dotted_key) pointer += c == '.' ? '/' : c;
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value; // plain string
    doc_[json::json_pointer(pointer)] = parsed;
}

std::string provenance_json(const RunConfig& cfg, const std::vector<std::string>& input_paths) {
    json p;
    p["tool"] = "ocean";
    p["version"] = kVersion;
    p["seed"] = cfg.seed();
    json inputs = json::object();
    for (const std::string& path : input_paths) inputs[path] = to_hex(fnv1a64_file(path));
    p["inputs"] = inputs;
    return p.dump();
}

namespace {

std::string default_sibling(const std::string& stem, const std::string& suffix) {
    return stem + suffix;
}

EmbeddingConfig embedding_config_of(const RunConfig& cfg) {
    EmbeddingConfig ec;
    // `embedding.id` presets the published (size, num sampled, window) triple.
    const int id = cfg.get<int>("/embedding/id", 0);
    if (id != 0) {
        InputKind kind = id == 1   ? InputKind::embedding1
                         : id == 2 ? InputKind::embedding2
                         : id == 3 ? InputKind::embedding3
                                   : InputKind::bow;
        if (kind == InputKind::bow)
            fail(ErrorCode::invalid_argument,
                 "config: embedding.id must be 1, 2 or 3, got " + std::to_string(id));
        EmbeddingParams p = embedding_params(kind);
        ec.dim = p.dim;
        ec.num_sampled = p.num_sampled;
        ec.window_mode = p.window_mode;
    }
    ec.dim = cfg.get<std::size_t>("/embedding/dim", ec.dim);
    ec.num_sampled = cfg.get<std::size_t>("/embedding/num_sampled", ec.num_sampled);
    const std::string mode = cfg.get<std::string>(
        "/embedding/window_mode",
        ec.window_mode == WindowMode::adjectives_w2 ? "adjectives_w2" : "all_words_w1");
    if (mode == "all_words_w1")
        ec.window_mode = WindowMode::all_words_w1;
    else if (mode == "adjectives_w2")
        ec.window_mode = WindowMode::adjectives_w2;
    else
        fail(ErrorCode::invalid_argument, "config: unknown embedding.window_mode '" + mode + "'");
    ec.learning_rate = cfg.get<double>("/embedding/learning_rate", 0.05);
    ec.epochs = cfg.get<std::size_t>("/embedding/epochs", 5);
    ec.batch_size = cfg.get<std::size_t>("/embedding/batch_size", 256);
    ec.seed = cfg.seed();
    return ec;
}

std::size_t max_len_of(const RunConfig& cfg) {
    return cfg.get<std::size_t>("/embedding/max_len", 32);
}

struct LoadedFeatures {
    FeatureExtractor extractor;
    // Owning storage behind the extractor closures.
    std::shared_ptr<Vocabulary> vocab;
    std::shared_ptr<EmbeddingMatrix> embedding;
};

LoadedFeatures load_features(const RunConfig& cfg, const ModelSpec& spec, std::size_t max_len) {
    LoadedFeatures lf;
    lf.vocab = std::make_shared<Vocabulary>(Vocabulary::load(cfg.require_path("vocab")));
    if (spec.input_kind == InputKind::bow) {
        FeatureExtractor raw = make_bow_features(*lf.vocab);
        lf.extractor.sample_shape = raw.sample_shape;
        lf.extractor.fill = [keep = lf.vocab, fill = std::move(raw.fill)](
                                const LabeledSentence& s, float* out) { fill(s, out); };
        return lf;
    }
    lf.embedding =
        std::make_shared<EmbeddingMatrix>(EmbeddingMatrix::load(cfg.require_path("embedding")));
    FeatureExtractor raw = make_embedding_features(*lf.vocab, *lf.embedding, max_len);
    lf.extractor.sample_shape = raw.sample_shape;
    lf.extractor.fill = [keep_v = lf.vocab, keep_e = lf.embedding, fill = std::move(raw.fill)](
                            const LabeledSentence& s, float* out) { fill(s, out); };
    return lf;
}

} // namespace

void stage_prep(const RunConfig& cfg, std::ostream& out) {
    const std::string corpus_path = cfg.require_path("corpus");
    const std::string lexicon_path = cfg.require_path("lexicon");
    const std::string stopwords_path = cfg.require_path("stopwords");
    const std::string out_path = cfg.path("labeled").empty() ? "labeled.jsonl"
                                                             : cfg.path("labeled");
    const std::string format = cfg.get<std::string>("/corpus_format", "jsonl");
    if (format != "jsonl" && format != "plain")
        fail(ErrorCode::invalid_argument, "config: corpus_format must be jsonl or plain");
    const bool strict = cfg.get<bool>("/strict", true);

    Lexicon lex = Lexicon::load(lexicon_path);
    Stopwords stopwords = Stopwords::load(stopwords_path);

    std::vector<LabeledSentence> labeled;
    std::size_t docs = 0;
    ingest_documents(corpus_path,
                     format == "jsonl" ? CorpusFormat::jsonl : CorpusFormat::plain, strict,
                     [&](RawDocument&& doc) {
                         ++docs;
                         auto ls = label_document(doc, lex, stopwords);
                         labeled.insert(labeled.end(), std::make_move_iterator(ls.begin()),
                                        std::make_move_iterator(ls.end()));
                     });

    write_labeled_jsonl(out_path, labeled,
                        provenance_json(cfg, {corpus_path, lexicon_path, stopwords_path}));
    out << "prep: " << docs << " documents -> " << labeled.size() << " labeled sentences -> "
        << out_path << "\n";
}

void stage_vocab(const RunConfig& cfg, std::ostream& out) {
    const std::string labeled_path = cfg.require_path("labeled");
    const std::string lexicon_path = cfg.require_path("lexicon");
    const std::string out_path = cfg.path("vocab").empty() ? "vocab.tsv" : cfg.path("vocab");
    const auto max_size =
        cfg.get<std::size_t>("/vocab/max_size", Vocabulary::kDefaultMaxSize);

    Lexicon lex = Lexicon::load(lexicon_path);
    auto labeled = read_labeled_jsonl(labeled_path);
    Vocabulary vocab = Vocabulary::build(labeled, max_size, lex);
    vocab.save(out_path, provenance_json(cfg, {labeled_path, lexicon_path}));
    out << "vocab: " << vocab.size() << " tokens -> " << out_path << "\n";
}

void stage_embed(const RunConfig& cfg, std::ostream& out) {
    const std::string labeled_path = cfg.require_path("labeled");
    const std::string vocab_path = cfg.require_path("vocab");
    const std::string out_path =
        cfg.path("embedding").empty() ? "embedding.txt" : cfg.path("embedding");
    EmbeddingConfig ec = embedding_config_of(cfg);

    auto labeled = read_labeled_jsonl(labeled_path);
    Vocabulary vocab = Vocabulary::load(vocab_path);
    std::vector<std::string> inputs{labeled_path, vocab_path};

    Lexicon lex;
    const Lexicon* lex_ptr = nullptr;
    if (ec.window_mode == WindowMode::adjectives_w2) {
        const std::string lexicon_path = cfg.require_path("lexicon");
        lex = Lexicon::load(lexicon_path);
        lex_ptr = &lex;
        inputs.push_back(lexicon_path);
    }

    SkipGramTrainLog log;
    EmbeddingMatrix emb = train_skipgram(labeled, vocab, lex_ptr, ec, &log);
    emb.save(out_path, provenance_json(cfg, inputs));
    out << "embed: " << log.pair_count << " pairs, dim " << ec.dim << ", " << ec.epochs
        << " epochs";
    if (!log.epoch_loss.empty())
        out << ", loss " << std::setprecision(5) << log.epoch_loss.front() << " -> "
            << log.epoch_loss.back();
    out << " -> " << out_path << "\n";
}

void stage_train(const RunConfig& cfg, std::ostream& out) {
    const int model_id = cfg.get<int>("/model/id", -1);
    if (model_id < 0) fail(ErrorCode::invalid_argument, "config: missing model.id");
    const ModelSpec& spec = catalog_spec(model_id);
    if (spec.baseline)
        fail(ErrorCode::invalid_argument,
             "model 0 is the constant mean baseline; it is computed during eval, not trained");

    const std::string labeled_path = cfg.require_path("labeled");
    const std::string stem = cfg.path("checkpoint").empty() ? ("model" + std::to_string(model_id))
                                                            : cfg.path("checkpoint");
    const std::string history_path = cfg.path("history").empty()
                                         ? default_sibling(stem, ".history.jsonl")
                                         : cfg.path("history");

    TrainConfig tc;
    tc.epochs = cfg.get<std::size_t>("/train/epochs", 10);
    tc.batch_size = cfg.get<std::size_t>("/train/batch_size", 128);
    tc.eval_every = cfg.get<std::size_t>("/train/eval_every", 1);
    tc.seed = cfg.seed();

    const std::size_t max_len = max_len_of(cfg);
    LoadedFeatures features = load_features(cfg, spec, max_len);

    auto labeled = read_labeled_jsonl(labeled_path);
    DatasetSplit split = split_dataset(std::move(labeled), tc.seed);
    out << "train: model " << model_id << " (" << task_name(spec.task) << ", "
        << input_kind_name(spec.input_kind) << "), split " << split.train.size() << "/"
        << split.validation.size() << "/" << split.test.size() << "\n";

    auto [netw, history] = train_model(spec, split, features.extractor, tc);

    std::vector<std::string> inputs{labeled_path, cfg.require_path("vocab")};
    if (spec.input_kind != InputKind::bow) inputs.push_back(cfg.require_path("embedding"));
    const std::string prov = provenance_json(cfg, inputs);

    json extra;
    extra["model_id"] = spec.id;
    extra["task"] = task_name(spec.task);
    extra["input_kind"] = input_kind_name(spec.input_kind);
    extra["seed"] = tc.seed;
    extra["hyperparameters"] = {{"learning_rate", spec.learning_rate},
                                {"optimizer", "adagrad"},
                                {"epochs", tc.epochs},
                                {"batch_size", tc.batch_size}};
    extra["sample_shape"] = features.extractor.sample_shape;
    extra["max_len"] = max_len;
    extra["provenance"] = json::parse(prov);
    netw.save(stem, extra);

    std::ofstream hist(history_path, std::ios::binary);
    if (!hist) fail(ErrorCode::io, "train: cannot write " + history_path);
    hist << "# provenance " << prov << "\n";
    for (const EpochRecord& r : history.epochs) {
        json line;
        line["epoch"] = r.epoch;
        line["train_loss"] = r.train_loss;
        if (r.epoch % std::max<std::size_t>(tc.eval_every, 1) == 0 ||
            r.epoch == history.epochs.size()) {
            line["test_loss"] = r.test_loss;
            const char* metric = spec.task == Task::regression ? "rmse" : "accuracy";
            const auto names = TraitVector::trait_names();
            for (std::size_t i = 0; i < TraitVector::kSize; ++i)
                line[metric][names[i]] = r.per_trait[i];
        }
        hist << line.dump() << "\n";
        out << "  epoch " << r.epoch << ": train loss " << std::setprecision(6) << r.train_loss
            << ", test loss " << r.test_loss << " (" << std::setprecision(3) << r.seconds
            << " s)\n";
    }
    out << "train: checkpoint -> " << stem << ".json / " << stem << ".bin, history -> "
        << history_path << "\n";
}

namespace {

std::string checkpoint_stem(const RunConfig& cfg) {
    const std::string stem = cfg.path("checkpoint");
    if (stem.empty()) fail(ErrorCode::invalid_argument, "config: missing paths.checkpoint");
    if (!fs::exists(stem + ".json"))
        fail(ErrorCode::not_found, "missing input for paths.checkpoint: " + stem + ".json");
    if (!fs::exists(stem + ".bin"))
        fail(ErrorCode::not_found, "missing input for paths.checkpoint: " + stem + ".bin");
    return stem;
}

} // namespace

void stage_eval(const RunConfig& cfg, std::ostream& out) {
    const std::string labeled_path = cfg.require_path("labeled");
    const std::string stem = checkpoint_stem(cfg);

    json manifest;
    net::Network<float> netw = net::Network<float>::load(stem, &manifest);
    const int model_id = manifest.value("model_id", -1);
    if (model_id < 0) fail(ErrorCode::parse, "eval: checkpoint manifest lacks model_id");
    const ModelSpec& spec = catalog_spec(model_id);
    const auto max_len = manifest.value("max_len", std::size_t{32});
    // The checkpoint pins the split seed so eval sees the same partition.
    const auto split_seed = manifest.value("seed", cfg.seed());

    LoadedFeatures features = load_features(cfg, spec, max_len);
    auto labeled = read_labeled_jsonl(labeled_path);
    DatasetSplit split = split_dataset(std::move(labeled), split_seed);
    const std::string split_name = cfg.get<std::string>("/eval/split", "test");
    const std::vector<LabeledSentence>* eval_set = nullptr;
    if (split_name == "train") eval_set = &split.train;
    else if (split_name == "validation") eval_set = &split.validation;
    else if (split_name == "test") eval_set = &split.test;
    else fail(ErrorCode::invalid_argument, "config: eval.split must be train|validation|test");
    if (eval_set->empty())
        fail(ErrorCode::invalid_argument, "eval: split '" + split_name + "' is empty");

    net::Tensor<float> fx = assemble_features(*eval_set, features.extractor);
    Predictions pred = predict(netw, fx, spec.task);

    MetricsReport report;
    report.model = "model-" + std::to_string(model_id);
    report.split = split_name;
    report.count = eval_set->size();

    if (spec.task == Task::regression) {
        const std::size_t n = eval_set->size();
        std::vector<double> p(n * TraitVector::kSize), t(n * TraitVector::kSize);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < TraitVector::kSize; ++j) {
                p[i * TraitVector::kSize + j] = static_cast<double>(pred.values.at2(i, j));
                t[i * TraitVector::kSize + j] = (*eval_set)[i].traits[j];
            }
        report.rmse = rmse_per_trait(p, t);

        std::vector<TraitVector> train_labels;
        train_labels.reserve(split.train.size());
        for (const LabeledSentence& s : split.train) train_labels.push_back(s.traits);
        Model0 m0 = Model0::fit(train_labels);
        std::vector<double> bp(n * TraitVector::kSize);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < TraitVector::kSize; ++j)
                bp[i * TraitVector::kSize + j] = m0.mean()[j];
        MetricsReport base;
        base.model = "model-0";
        base.split = split_name;
        base.count = n;
        base.rmse = rmse_per_trait(bp, t);
        report = compare_report(report, base);
    } else {
        std::vector<BinaryLabels> truth;
        truth.reserve(eval_set->size());
        for (const LabeledSentence& s : *eval_set) truth.push_back(s.labels);
        report.classification = binary_metrics(pred.bits, truth);
    }

    std::vector<std::string> inputs{labeled_path, stem + ".json", stem + ".bin"};
    const std::string report_path =
        cfg.path("report").empty() ? default_sibling(stem, ".metrics.json") : cfg.path("report");
    json rj = report.to_json();
    rj["provenance"] = json::parse(provenance_json(cfg, inputs));
    std::ofstream rf(report_path, std::ios::binary);
    if (!rf) fail(ErrorCode::io, "eval: cannot write " + report_path);
    rf << rj.dump(2) << "\n";
    out << report.to_text_table();
    out << "eval: report -> " << report_path << "\n";
}

void stage_predict(const RunConfig& cfg, std::ostream& out) {
    const std::string stem = checkpoint_stem(cfg);
    const std::string input_path = cfg.require_path("input");
    const std::string lexicon_path = cfg.require_path("lexicon");
    const std::string stopwords_path = cfg.require_path("stopwords");
    const std::string out_path =
        cfg.path("predictions").empty() ? "predictions.jsonl" : cfg.path("predictions");

    json manifest;
    net::Network<float> netw = net::Network<float>::load(stem, &manifest);
    const int model_id = manifest.value("model_id", -1);
    if (model_id < 0) fail(ErrorCode::parse, "predict: checkpoint manifest lacks model_id");
    const ModelSpec& spec = catalog_spec(model_id);
    const auto max_len = manifest.value("max_len", std::size_t{32});

    Lexicon lex = Lexicon::load(lexicon_path);
    Stopwords stopwords = Stopwords::load(stopwords_path);
    LoadedFeatures features = load_features(cfg, spec, max_len);

    // One input text per line, run through the training-time normalization.
    std::ifstream in(input_path);
    if (!in) fail(ErrorCode::io, "predict: cannot open " + input_path);
    std::vector<LabeledSentence> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        LabeledSentence s;
        s.tokens = normalize_tokens(line, stopwords, &lex);
        rows.push_back(std::move(s));
    }
    if (rows.empty()) fail(ErrorCode::invalid_argument, "predict: no input lines in " + input_path);

    net::Tensor<float> fx = assemble_features(rows, features.extractor);
    Predictions pred = predict(netw, fx, spec.task);

    std::ofstream of(out_path, std::ios::binary);
    if (!of) fail(ErrorCode::io, "predict: cannot write " + out_path);
    of << "# provenance "
       << provenance_json(cfg, {input_path, stem + ".json", stem + ".bin"}) << "\n";
    const auto names = TraitVector::trait_names();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        json j;
        j["line"] = i + 1;
        if (spec.task == Task::regression) {
            for (std::size_t k = 0; k < TraitVector::kSize; ++k)
                j["traits"][names[k]] = pred.values.at2(i, k);
        } else {
            j["bits"] = pred.bits[i].bits;
            std::vector<float> probs(pred.values.data() + i * 10,
                                     pred.values.data() + (i + 1) * 10);
            j["probs"] = probs;
        }
        of << j.dump() << "\n";
    }
    out << "predict: " << rows.size() << " lines -> " << out_path << "\n";
}

namespace {

using DNet = net::Network<double>;
using DTensor = net::Tensor<double>;

DTensor random_input(std::vector<std::size_t> shape, std::uint64_t seed) {
    Rng rng(seed);
    return DTensor::uniform(std::move(shape), -1.0, 1.0, rng);
}

// Values pairwise separated by >= 0.05 so max-pool argmaxes sit far from
// any finite-difference perturbation.
DTensor separated_input(std::vector<std::size_t> shape, std::uint64_t seed) {
    DTensor t(std::move(shape));
    std::vector<std::size_t> order(t.numel());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    for (std::size_t i = 0; i < t.numel(); ++i)
        t[i] = 0.05 * static_cast<double>(order[i]) - 0.025 * static_cast<double>(t.numel());
    return t;
}

std::function<double(const DTensor&, DTensor*)> mse_against(std::vector<std::size_t> shape,
                                                            std::uint64_t seed) {
    Rng rng(seed);
    auto target = std::make_shared<DTensor>(DTensor::uniform(std::move(shape), -1.0, 1.0, rng));
    return [target](const DTensor& y, DTensor* grad) {
        return net::mse_loss<double>(y, *target, grad);
    };
}

std::function<double(const DTensor&, DTensor*)> grouped_ce_against(std::size_t batch,
                                                                   std::uint64_t seed) {
    Rng rng(seed);
    auto labels = std::make_shared<std::vector<BinaryLabels>>(batch);
    for (auto& l : *labels)
        for (auto& b : l.bits) b = rng.below(2) ? 1 : 0;
    return [labels](const DTensor& y, DTensor* grad) {
        return net::grouped_softmax_ce<double>(y, *labels, grad);
    };
}

GradCheckCase run_case(const std::string& name, DNet& netw, const DTensor& input,
                       const std::function<double(const DTensor&, DTensor*)>& loss,
                       bool gated = true) {
    net::GradCheckReport report = net::check_network_gradients(netw, input, loss);
    return {name, report.max_rel_err(), gated};
}

GradCheckCase negative_sampling_case() {
    // 5-word vocabulary, D = 3, k = 3 negatives, checked by direct central
    // differences on every participating vector.
    constexpr std::size_t dim = 3, k = 3;
    Rng rng(7);
    std::vector<std::vector<double>> rows(5, std::vector<double>(dim));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform(-1.0, 1.0);
    auto& target = rows[0];
    auto& context = rows[1];
    std::array<const double*, k> negs{rows[2].data(), rows[3].data(), rows[4].data()};

    std::vector<double> g_t(dim, 0.0), g_c(dim, 0.0);
    std::vector<std::vector<double>> g_n(k, std::vector<double>(dim, 0.0));
    std::array<double*, k> g_negs{g_n[0].data(), g_n[1].data(), g_n[2].data()};
    negative_sampling_loss<double>(target.data(), context.data(), negs.data(), k, dim,
                                   g_t.data(), g_c.data(), g_negs.data());

    auto loss_only = [&]() {
        return negative_sampling_loss<double>(target.data(), context.data(), negs.data(), k,
                                              dim);
    };
    const double h = 1e-4;
    std::vector<double> analytic, numeric;
    auto sweep = [&](std::vector<double>& vec, const std::vector<double>& grad) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double saved = vec[d];
            vec[d] = saved + h;
            const double lp = loss_only();
            vec[d] = saved - h;
            const double lm = loss_only();
            vec[d] = saved;
            analytic.push_back(grad[d]);
            numeric.push_back((lp - lm) / (2.0 * h));
        }
    };
    sweep(target, g_t);
    sweep(context, g_c);
    for (std::size_t j = 0; j < k; ++j) sweep(rows[2 + j], g_n[j]);
    return {"negative-sampling k=3 d=3", net::block_rel_err(analytic, numeric), true};
}

} // namespace

std::vector<GradCheckCase> gradcheck_suite() {
    std::vector<GradCheckCase> cases;
    const net::Padding same = net::Padding::same;
    const net::Padding valid = net::Padding::valid;

    {
        Rng rng(11);
        DNet n;
        n.add_dense(6, 4, rng);
        n.add_relu();
        n.add_dense(4, 5, rng);
        cases.push_back(run_case("dense+relu+dense+mse", n, random_input({3, 6}, 21),
                                 mse_against({3, 5}, 31)));
    }
    {
        Rng rng(12);
        DNet n;
        n.add_dense(6, 4, rng);
        n.add_batchnorm(4);
        n.add_relu();
        n.add_dense(4, 5, rng);
        cases.push_back(run_case("dense+batchnorm+relu+dense+mse", n, random_input({4, 6}, 22),
                                 mse_against({4, 5}, 32)));
    }
    {
        DNet n;
        n.add_sigmoid();
        cases.push_back(
            run_case("sigmoid+mse", n, random_input({3, 7}, 23), mse_against({3, 7}, 33)));
    }
    {
        Rng rng(14);
        DNet n;
        n.add_conv(3, 3, 2, 4, 1, valid, rng);
        cases.push_back(run_case("conv3x3 s1 valid+mse", n, random_input({2, 5, 6, 2}, 24),
                                 mse_against({2, 3, 4, 4}, 34)));
    }
    {
        Rng rng(15);
        DNet n;
        n.add_conv(3, 3, 2, 3, 1, same, rng);
        cases.push_back(run_case("conv3x3 s1 same+mse", n, random_input({2, 5, 6, 2}, 25),
                                 mse_against({2, 5, 6, 3}, 35)));
    }
    {
        Rng rng(16);
        DNet n;
        n.add_conv(3, 3, 2, 3, 2, same, rng);
        n.add_batchnorm(3);
        n.add_relu();
        cases.push_back(run_case("conv3x3 s2 same+batchnorm+relu+mse", n,
                                 random_input({2, 6, 8, 2}, 26), mse_against({2, 3, 4, 3}, 36)));
    }
    {
        Rng rng(17);
        DNet n;
        n.add_conv(2, 3, 2, 3, 2, valid, rng);
        cases.push_back(run_case("conv2x3 s2 valid+mse", n, random_input({2, 6, 7, 2}, 27),
                                 mse_against({2, 3, 3, 3}, 37)));
    }
    {
        DNet n;
        n.add_maxpool(2, 2, 2, valid);
        cases.push_back(run_case("maxpool2x2 s2 valid+mse", n, separated_input({1, 4, 4, 2}, 28),
                                 mse_against({1, 2, 2, 2}, 38)));
    }
    {
        DNet n;
        n.add_maxpool(4, 4, 2, same);
        cases.push_back(run_case("maxpool4x4 s2 same+mse", n, separated_input({1, 6, 6, 2}, 29),
                                 mse_against({1, 3, 3, 2}, 39)));
    }
    {
        DNet n;
        n.add_batchnorm(3);
        cases.push_back(run_case("batchnorm train-mode+mse", n, random_input({5, 3}, 30),
                                 mse_against({5, 3}, 40)));
    }
    {
        Rng rng(19);
        DNet n;
        n.add_dense(6, 10, rng);
        cases.push_back(run_case("dense+grouped-softmax-ce", n, random_input({4, 6}, 41),
                                 grouped_ce_against(4, 51)));
    }
    {
        Rng rng(20);
        DNet n;
        n.add_conv(3, 3, 2, 4, 2, same, rng);
        n.add_batchnorm(4);
        n.add_relu();
        n.add_dense(4 * 3 * 4, 10, rng);
        cases.push_back(run_case("conv s2 same+batchnorm+grouped-softmax-ce", n,
                                 random_input({3, 8, 6, 2}, 42), grouped_ce_against(3, 52)));
    }
    cases.push_back(negative_sampling_case());
    {
        // All-zero input parks every ReLU on its kink; the analytic
        // subgradient and the two-sided difference legitimately disagree, so
        // this case only asserts a finite, NaN-free report.
        Rng rng(21);
        DNet n;
        n.add_dense(4, 3, rng);
        n.add_relu();
        DTensor zero({2, 4});
        cases.push_back(run_case("degenerate zero input (finiteness)", n, zero,
                                 mse_against({2, 3}, 53), /*gated=*/false));
    }
    return cases;
}

void stage_gradcheck(const RunConfig& cfg, std::ostream& out) {
    (void)cfg;
    auto cases = gradcheck_suite();
    bool ok = true;
    for (const auto& c : cases) {
        out << std::left << std::setw(44) << c.name << " max rel err "
            << std::scientific << std::setprecision(3) << c.max_rel_err
            << (c.gated ? "" : "  (finiteness only)") << "\n";
        if (c.gated && !(c.max_rel_err < 1e-4)) ok = false;
        if (!std::isfinite(c.max_rel_err)) ok = false;
    }
    if (!ok) fail(ErrorCode::internal, "gradcheck: at least one case exceeded 1e-4");
    out << "gradcheck: all " << cases.size() << " cases within tolerance\n";
}

json catalog_as_json() {
    json arr = json::array();
    for (const ModelSpec& m : catalog()) {
        json j;
        j["id"] = m.id;
        j["task"] = task_name(m.task);
        j["input"] = input_kind_name(m.input_kind);
        j["baseline"] = m.baseline;
        j["output_units"] = m.output_units;
        j["learning_rate"] = m.learning_rate;
        if (m.input_kind != InputKind::bow) {
            EmbeddingParams p = embedding_params(m.input_kind);
            j["embedding"] = {{"dim", p.dim},
                              {"num_sampled", p.num_sampled},
                              {"window", p.window_mode == WindowMode::adjectives_w2
                                             ? "adjectives_w2"
                                             : "all_words_w1"}};
        }
        json layers = json::array();
        for (const LayerDesc& d : m.layers) {
            json l;
            switch (d.kind) {
                case LayerDesc::Kind::dense:
                    l["kind"] = "dense";
                    l["width"] = d.width;
                    break;
                case LayerDesc::Kind::conv:
                    l["kind"] = "conv";
                    l["kernel"] = {d.kh, d.kw};
                    l["filters"] = d.filters;
                    l["stride"] = d.stride;
                    l["padding"] = net::padding_name(d.pad);
                    break;
                case LayerDesc::Kind::maxpool:
                    l["kind"] = "maxpool";
                    l["window"] = {d.kh, d.kw};
                    l["stride"] = d.stride;
                    l["padding"] = net::padding_name(d.pad);
                    break;
            }
            layers.push_back(l);
        }
        j["layers"] = layers;
        arr.push_back(j);
    }
    return arr;
}

void run(const std::string& command, const RunConfig& cfg, std::ostream& out) {
    if (command == "prep") return stage_prep(cfg, out);
    if (command == "vocab") return stage_vocab(cfg, out);
    if (command == "embed") return stage_embed(cfg, out);
    if (command == "train") return stage_train(cfg, out);
    if (command == "eval") return stage_eval(cfg, out);
    if (command == "predict") return stage_predict(cfg, out);
    if (command == "gradcheck") return stage_gradcheck(cfg, out);
    if (command == "catalog") {
        out << catalog_as_json().dump(2) << "\n";
        return;
    }
    fail(ErrorCode::invalid_argument, "unknown command '" + command + "'");
}

} // namespace ocean::pipeline
