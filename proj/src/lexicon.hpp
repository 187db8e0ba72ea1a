#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "traits.hpp"

namespace ocean {

// Adjective -> trait-vector dictionary used for distant supervision.
// File format: TSV with header `adjective<TAB>o<TAB>c<TAB>e<TAB>a<TAB>n`,
// UTF-8, '#'-prefixed comment lines ignored. Immutable after load.
class Lexicon {
public:
    Lexicon() = default;

    static Lexicon load(const std::string& path);

    std::size_t size() const { return entries_.size(); }
    bool contains(const std::string& token) const { return entries_.count(token) != 0; }

    const TraitVector* find(const std::string& token) const {
        auto it = entries_.find(token);
        return it == entries_.end() ? nullptr : &it->second;
    }

    // Componentwise mean over every matched occurrence; no adjective
    // present means the sentence carries no label and must be dropped.
    std::optional<TraitVector> match_and_label(std::span<const std::string> tokens) const;

    // Keys in lexicographic order; also defines the stable adjective
    // indexing used by the adjective-centered embedding.
    std::vector<std::string> sorted_keys() const;

    void insert(std::string adjective, const TraitVector& traits);

private:
    std::unordered_map<std::string, TraitVector> entries_;
};

} // namespace ocean
