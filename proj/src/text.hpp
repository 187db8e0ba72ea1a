#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ocean {

class Lexicon;

// Splits on '.', '!' or '?' runs followed by whitespace or end of text.
// Delimiters are stripped and empty segments dropped, so an ellipsis
// collapses to a single boundary.
std::vector<std::string> sentence_split(std::string_view text);

// Fixed English stopword list, one token per line, '#' comments ignored.
class Stopwords {
public:
    Stopwords() = default;

    static Stopwords load(const std::string& path);
    static Stopwords from_tokens(std::initializer_list<std::string> tokens);

    bool contains(const std::string& token) const { return words_.count(token) != 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

// Lowercases, splits on non-alphanumeric runs, removes stopwords, drops
// pure-number tokens, then stems. Tokens that are lexicon adjectives are
// kept in dictionary form (matching happens before stemming), which is
// why the lexicon is consulted here; pass nullptr to stem everything.
std::vector<std::string> normalize_tokens(std::string_view sentence,
                                          const Stopwords& stopwords,
                                          const Lexicon* lexicon = nullptr);

} // namespace ocean
