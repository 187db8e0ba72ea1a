#include "lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ocean {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_real(const std::string& field, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(field, &pos);
        return pos == field.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream in(line);
    // Accept tabs or runs of spaces between columns.
    while (in >> cur) fields.push_back(cur);
    return fields;
}

} // namespace

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "lexicon: cannot open " + path);

    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (!seen_data && lowercase(fields[0]) == "adjective") continue; // header row
        seen_data = true;
        if (fields.size() != 1 + TraitVector::kSize)
            fail(ErrorCode::parse, "lexicon: line " + std::to_string(line_no) +
                                       ": expected 1 token + 5 reals, got " +
                                       std::to_string(fields.size()) + " fields");
        TraitVector t;
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
            if (!parse_real(fields[i + 1], t[i]))
                fail(ErrorCode::parse, "lexicon: line " + std::to_string(line_no) +
                                           ": cannot parse '" + fields[i + 1] + "' as real");
        }
        std::string key = lowercase(fields[0]);
        if (lex.entries_.count(key))
            fail(ErrorCode::parse,
                 "lexicon: line " + std::to_string(line_no) + ": duplicate adjective '" + key + "'");
        lex.entries_.emplace(std::move(key), t);
    }
    return lex;
}

void Lexicon::insert(std::string adjective, const TraitVector& traits) {
    if (adjective.empty())
        fail(ErrorCode::invalid_argument, "lexicon: empty adjective key");
    entries_[lowercase(std::move(adjective))] = traits;
}

std::optional<TraitVector> Lexicon::match_and_label(std::span<const std::string> tokens) const {
    TraitVector sum;
    std::size_t matches = 0;
    for (const auto& tok : tokens) {
        if (const TraitVector* t = find(tok)) {
            for (std::size_t i = 0; i < TraitVector::kSize; ++i) sum[i] += (*t)[i];
            ++matches;
        }
    }
    if (matches == 0) return std::nullopt;
    for (std::size_t i = 0; i < TraitVector::kSize; ++i) sum[i] /= static_cast<double>(matches);
    return sum;
}

std::vector<std::string> Lexicon::sorted_keys() const {
    std::vector<std::string> keys;
    keys.reserve(entries_.size());
    for (const auto& [k, v] : entries_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    return keys;
}

} // namespace ocean
