#include "vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace ocean {

Vocabulary Vocabulary::build(std::span<const LabeledSentence> corpus, std::size_t max_size,
                             const Lexicon& lex) {
    if (max_size < 1) fail(ErrorCode::invalid_argument, "vocabulary: max_size must be >= 1");
    if (corpus.empty()) fail(ErrorCode::invalid_argument, "vocabulary: empty corpus");

    std::unordered_map<std::string, std::uint64_t> freq;
    for (const LabeledSentence& s : corpus)
        for (const std::string& tok : s.tokens)
            if (!lex.contains(tok)) ++freq[tok];

    std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > max_size) ranked.resize(max_size);

    Vocabulary v;
    v.id_to_token_.reserve(ranked.size());
    v.counts_.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        v.token_to_id_.emplace(ranked[i].first, static_cast<std::int32_t>(i + 1));
        v.id_to_token_.push_back(std::move(ranked[i].first));
        v.counts_.push_back(ranked[i].second);
    }
    return v;
}

std::vector<std::int32_t> Vocabulary::encode(std::span<const std::string> tokens) const {
    std::vector<std::int32_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& t : tokens) ids.push_back(encode(t));
    return ids;
}

const std::string& Vocabulary::decode(std::int32_t id) const {
    static const std::string unk = kUnkToken;
    if (id == kUnkId) return unk;
    if (id < 0 || static_cast<std::size_t>(id) > id_to_token_.size())
        fail(ErrorCode::invalid_argument, "vocabulary: id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id - 1)];
}

std::uint64_t Vocabulary::count(std::int32_t id) const {
    if (id <= 0 || static_cast<std::size_t>(id) > counts_.size()) return 0;
    return counts_[static_cast<std::size_t>(id - 1)];
}

void Vocabulary::save(const std::string& path, const std::string& provenance_json) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "vocabulary: cannot write " + path);
    out << "#vocab v1 size=" << size() << " unk=0\n";
    if (!provenance_json.empty()) out << "# provenance " << provenance_json << "\n";
    for (std::size_t i = 0; i < id_to_token_.size(); ++i)
        out << id_to_token_[i] << '\t' << (i + 1) << '\t' << counts_[i] << "\n";
    if (!out) fail(ErrorCode::io, "vocabulary: write failed for " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "vocabulary: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#vocab v1", 0) != 0)
        fail(ErrorCode::parse, "vocabulary: missing '#vocab v1' header in " + path);

    Vocabulary v;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string token;
        long long id = 0;
        unsigned long long count = 0;
        if (!(row >> token >> id >> count) || id <= 0)
            fail(ErrorCode::parse,
                 "vocabulary: line " + std::to_string(line_no) + ": malformed row");
        if (static_cast<std::size_t>(id) != v.id_to_token_.size() + 1)
            fail(ErrorCode::parse, "vocabulary: line " + std::to_string(line_no) +
                                       ": ids must be consecutive from 1");
        v.token_to_id_.emplace(token, static_cast<std::int32_t>(id));
        v.id_to_token_.push_back(std::move(token));
        v.counts_.push_back(count);
    }
    return v;
}

} // namespace ocean
