#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace ocean {

// Frequency-ranked token dictionary. Ids run 1..K ordered by non-increasing
// corpus frequency (lexicographic tie-break); id 0 is reserved for UNK so
// ids index directly into embedding row 0. Lexicon adjectives are excluded
// and therefore always encode to UNK. Immutable once built.
class Vocabulary {
public:
    static constexpr std::int32_t kUnkId = 0;
    static constexpr const char* kUnkToken = "UNK";
    static constexpr std::size_t kDefaultMaxSize = 60000;

    Vocabulary() = default;

    static Vocabulary build(std::span<const LabeledSentence> corpus, std::size_t max_size,
                            const Lexicon& lex);

    // File format: `#vocab v1 size=K unk=0` header, '#' comments, then
    // `token<TAB>id<TAB>count` rows sorted by id.
    static Vocabulary load(const std::string& path);
    void save(const std::string& path, const std::string& provenance_json = "") const;

    std::size_t size() const { return id_to_token_.size(); } // K, excludes UNK

    std::int32_t encode(const std::string& token) const {
        auto it = token_to_id_.find(token);
        return it == token_to_id_.end() ? kUnkId : it->second;
    }

    std::vector<std::int32_t> encode(std::span<const std::string> tokens) const;

    // Id 0 decodes to the literal token "UNK".
    const std::string& decode(std::int32_t id) const;

    std::uint64_t count(std::int32_t id) const;

private:
    std::unordered_map<std::string, std::int32_t> token_to_id_;
    std::vector<std::string> id_to_token_; // index i holds token for id i+1
    std::vector<std::uint64_t> counts_;    // parallel to id_to_token_
};

} // namespace ocean
