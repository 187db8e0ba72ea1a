#include "corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace ocean {

using nlohmann::json;

void ingest_documents(const std::string& path, CorpusFormat format, bool strict,
                      const std::function<void(RawDocument&&)>& sink) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "corpus: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (format == CorpusFormat::plain) {
            sink(RawDocument{"line-" + std::to_string(line_no), line});
            continue;
        }
        json obj = json::parse(line, nullptr, false);
        std::string problem;
        if (obj.is_discarded()) {
            problem = "invalid JSON";
        } else if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string()) {
            problem = "missing string field \"text\"";
        }
        if (!problem.empty()) {
            if (strict)
                fail(ErrorCode::parse,
                     "corpus: line " + std::to_string(line_no) + ": " + problem);
            continue;
        }
        std::string id = obj.contains("review_id") && obj["review_id"].is_string()
                             ? obj["review_id"].get<std::string>()
                             : "line-" + std::to_string(line_no);
        sink(RawDocument{std::move(id), obj["text"].get<std::string>()});
    }
}

std::vector<RawDocument> read_documents(const std::string& path, CorpusFormat format,
                                        bool strict) {
    std::vector<RawDocument> docs;
    ingest_documents(path, format, strict, [&](RawDocument&& d) { docs.push_back(std::move(d)); });
    return docs;
}

std::vector<LabeledSentence> label_document(const RawDocument& doc, const Lexicon& lex,
                                            const Stopwords& stopwords) {
    std::vector<LabeledSentence> out;
    for (const std::string& sentence : sentence_split(doc.text)) {
        LabeledSentence ls;
        ls.tokens = normalize_tokens(sentence, stopwords, &lex);
        for (std::size_t i = 0; i < ls.tokens.size(); ++i)
            if (lex.contains(ls.tokens[i])) ls.adjective_positions.push_back(i);
        if (ls.adjective_positions.empty()) continue;
        auto traits = lex.match_and_label(ls.tokens);
        ls.traits = *traits;
        ls.labels = binarize(ls.traits);
        out.push_back(std::move(ls));
    }
    return out;
}

std::vector<LabeledSentence> build_labeled_corpus(std::span<const RawDocument> docs,
                                                  const Lexicon& lex,
                                                  const Stopwords& stopwords) {
    std::vector<LabeledSentence> out;
    for (const RawDocument& doc : docs) {
        auto labeled = label_document(doc, lex, stopwords);
        out.insert(out.end(), std::make_move_iterator(labeled.begin()),
                   std::make_move_iterator(labeled.end()));
    }
    return out;
}

namespace {

int label_pattern(const BinaryLabels& labels) {
    int p = 0;
    for (std::size_t i = 0; i < labels.bits.size(); ++i) p = (p << 1) | labels.bits[i];
    return p;
}

} // namespace

DatasetSplit split_dataset(std::vector<LabeledSentence> sentences, std::uint64_t seed) {
    const std::size_t n = sentences.size();
    if (n < 10)
        fail(ErrorCode::invalid_argument,
             "split_dataset: need at least 10 sentences, got " + std::to_string(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    // Group by joint label pattern, preserving shuffled order. Patterns too
    // small to stratify share one pool.
    constexpr std::size_t kMinStratum = 10;
    std::array<std::vector<std::size_t>, 32> groups;
    for (std::size_t idx : order)
        groups[static_cast<std::size_t>(label_pattern(sentences[idx].labels))].push_back(idx);
    std::vector<std::vector<std::size_t>> buckets;
    std::vector<std::size_t> pool;
    for (auto& g : groups) {
        if (g.size() >= kMinStratum)
            buckets.push_back(std::move(g));
        else
            pool.insert(pool.end(), g.begin(), g.end());
    }
    if (!pool.empty()) buckets.push_back(std::move(pool));

    // Allocate each bucket against cumulative rounded 70/80% targets so the
    // overall cut stays within one item of 70/10/20.
    DatasetSplit split;
    long long assigned = 0, train_so_far = 0, trainval_so_far = 0;
    for (const auto& bucket : buckets) {
        const long long m = static_cast<long long>(bucket.size());
        const long long cum = assigned + m;
        long long train_take =
            std::llround(0.7 * static_cast<double>(cum)) - train_so_far;
        train_take = std::clamp(train_take, 0LL, m);
        long long trainval_take =
            std::llround(0.8 * static_cast<double>(cum)) - trainval_so_far;
        trainval_take = std::clamp(trainval_take, train_take, m);
        for (long long i = 0; i < m; ++i) {
            LabeledSentence& s = sentences[bucket[static_cast<std::size_t>(i)]];
            if (i < train_take)
                split.train.push_back(std::move(s));
            else if (i < trainval_take)
                split.validation.push_back(std::move(s));
            else
                split.test.push_back(std::move(s));
        }
        assigned = cum;
        train_so_far += train_take;
        trainval_so_far += trainval_take;
    }
    return split;
}

void write_labeled_jsonl(const std::string& path, std::span<const LabeledSentence> sentences,
                         const std::string& provenance_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "corpus: cannot write " + path);
    if (!provenance_json.empty()) out << "# provenance " << provenance_json << "\n";
    for (const LabeledSentence& s : sentences) {
        json obj;
        obj["tokens"] = s.tokens;
        obj["adj"] = s.adjective_positions;
        obj["traits"] = {s.traits.o, s.traits.c, s.traits.e, s.traits.a, s.traits.n};
        obj["labels"] = s.labels.bits;
        out << obj.dump() << "\n";
    }
    if (!out) fail(ErrorCode::io, "corpus: write failed for " + path);
}

std::vector<LabeledSentence> read_labeled_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "corpus: cannot open " + path);
    std::vector<LabeledSentence> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            fail(ErrorCode::parse, "labeled corpus: line " + std::to_string(line_no) +
                                       ": invalid JSON");
        try {
            LabeledSentence s;
            s.tokens = obj.at("tokens").get<std::vector<std::string>>();
            s.adjective_positions = obj.at("adj").get<std::vector<std::size_t>>();
            auto traits = obj.at("traits").get<std::vector<double>>();
            auto labels = obj.at("labels").get<std::vector<int>>();
            if (traits.size() != TraitVector::kSize || labels.size() != TraitVector::kSize)
                throw json::other_error::create(501, "bad field width", nullptr);
            for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
                s.traits[i] = traits[i];
                s.labels.bits[i] = labels[i];
            }
            for (std::size_t p : s.adjective_positions)
                if (p >= s.tokens.size())
                    throw json::other_error::create(502, "adjective position out of range",
                                                    nullptr);
            out.push_back(std::move(s));
        } catch (const json::exception& e) {
            fail(ErrorCode::parse, "labeled corpus: line " + std::to_string(line_no) + ": " +
                                       e.what());
        }
    }
    return out;
}

} // namespace ocean
