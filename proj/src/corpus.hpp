#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lexicon.hpp"
#include "text.hpp"
#include "traits.hpp"

namespace ocean {

struct RawDocument {
    std::string id;
    std::string text;
};

enum class CorpusFormat { jsonl, plain };

// Streams documents in file order; blank lines are skipped. In jsonl mode
// each line must be an object with a string "text" field ("review_id" is
// used as the id when present). A malformed line aborts with its line
// number under strict, and is skipped otherwise.
void ingest_documents(const std::string& path, CorpusFormat format, bool strict,
                      const std::function<void(RawDocument&&)>& sink);

std::vector<RawDocument> read_documents(const std::string& path, CorpusFormat format,
                                        bool strict = true);

// A sentence that matched at least one lexicon adjective.
struct LabeledSentence {
    std::vector<std::string> tokens;          // normalized
    std::vector<std::size_t> adjective_positions; // indices into tokens, never empty
    TraitVector traits;
    BinaryLabels labels;
};

// sentence_split -> normalize_tokens -> match_and_label; adjective-free
// sentences are dropped.
std::vector<LabeledSentence> label_document(const RawDocument& doc, const Lexicon& lex,
                                            const Stopwords& stopwords);

std::vector<LabeledSentence> build_labeled_corpus(std::span<const RawDocument> docs,
                                                  const Lexicon& lex,
                                                  const Stopwords& stopwords);

struct DatasetSplit {
    std::vector<LabeledSentence> train;
    std::vector<LabeledSentence> validation;
    std::vector<LabeledSentence> test;
};

// Deterministic seeded shuffle, then a 70/10/20 cut stratified on the
// 5-bit label pattern (patterns with fewer than 10 members share one
// unstratified pool). Requires at least 10 sentences.
DatasetSplit split_dataset(std::vector<LabeledSentence> sentences, std::uint64_t seed);

// Labeled-corpus JSON-lines:
//   {"id":..., "tokens":[...], "adj":[...], "traits":[5 reals], "labels":[5 ints]}
// Lines starting with '#' are comments (the writer puts provenance there).
void write_labeled_jsonl(const std::string& path, std::span<const LabeledSentence> sentences,
                         const std::string& provenance_json);
std::vector<LabeledSentence> read_labeled_jsonl(const std::string& path);

} // namespace ocean
