#include "text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "error.hpp"
#include "lexicon.hpp"
#include "stemmer.hpp"

namespace ocean {

namespace {

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::vector<std::string> sentence_split(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        std::string_view seg = trim(text.substr(start, end - start));
        if (!seg.empty()) out.emplace_back(seg);
    };
    while (i < text.size()) {
        if (is_sentence_end(text[i])) {
            std::size_t run_end = i;
            while (run_end < text.size() && is_sentence_end(text[run_end])) ++run_end;
            bool boundary = run_end == text.size() ||
                            std::isspace(static_cast<unsigned char>(text[run_end]));
            if (boundary) {
                flush(i);
                start = run_end;
            }
            i = run_end;
        } else {
            ++i;
        }
    }
    flush(text.size());
    return out;
}

Stopwords Stopwords::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "stopwords: cannot open " + path);
    Stopwords sw;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view tok = trim(line);
        if (tok.empty() || tok[0] == '#') continue;
        std::string w(tok);
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        sw.words_.insert(std::move(w));
    }
    return sw;
}

Stopwords Stopwords::from_tokens(std::initializer_list<std::string> tokens) {
    Stopwords sw;
    for (const auto& t : tokens) sw.words_.insert(t);
    return sw;
}

std::vector<std::string> normalize_tokens(std::string_view sentence,
                                          const Stopwords& stopwords,
                                          const Lexicon* lexicon) {
    std::vector<std::string> out;
    std::string cur;
    bool has_alpha = false;
    auto flush = [&] {
        if (!cur.empty() && has_alpha && !stopwords.contains(cur)) {
            if (lexicon != nullptr && lexicon->contains(cur))
                out.push_back(cur); // dictionary form, matched before stemming
            else
                out.push_back(porter_stem(cur));
        }
        cur.clear();
        has_alpha = false;
    };
    for (char ch : sentence) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (std::isalpha(c)) has_alpha = true;
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

} // namespace ocean
