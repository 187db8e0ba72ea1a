#include "ocean/ocean.h"

#include <cstring>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "error.hpp"
#include "lexicon.hpp"
#include "pipeline.hpp"
#include "version.hpp"
#include "vocab.hpp"

namespace {

thread_local std::string g_last_error;

ocean_status status_of(ocean::ErrorCode code) {
    switch (code) {
        case ocean::ErrorCode::invalid_argument: return OCEAN_ERR_INVALID_ARGUMENT;
        case ocean::ErrorCode::io: return OCEAN_ERR_IO;
        case ocean::ErrorCode::parse: return OCEAN_ERR_PARSE;
        case ocean::ErrorCode::not_found: return OCEAN_ERR_NOT_FOUND;
        case ocean::ErrorCode::internal: return OCEAN_ERR_INTERNAL;
    }
    return OCEAN_ERR_INTERNAL;
}

template <class Fn>
ocean_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return OCEAN_OK;
    } catch (const ocean::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OCEAN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return OCEAN_ERR_INTERNAL;
    }
}

} // namespace

struct ocean_lexicon {
    ocean::Lexicon impl;
};

struct ocean_vocab {
    ocean::Vocabulary impl;
};

extern "C" {

const char* ocean_version(void) { return ocean::kVersion; }

const char* ocean_status_name(ocean_status status) {
    switch (status) {
        case OCEAN_OK: return "ok";
        case OCEAN_ERR_INVALID_ARGUMENT: return "invalid argument";
        case OCEAN_ERR_IO: return "io error";
        case OCEAN_ERR_PARSE: return "parse error";
        case OCEAN_ERR_NOT_FOUND: return "not found";
        case OCEAN_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* ocean_last_error(void) { return g_last_error.c_str(); }

ocean_status ocean_run(const char* command, const char* config_json) {
    return guarded([&] {
        if (!command) ocean::fail(ocean::ErrorCode::invalid_argument, "command is null");
        nlohmann::json doc = nlohmann::json::object();
        if (config_json && *config_json) {
            doc = nlohmann::json::parse(config_json, nullptr, false);
            if (doc.is_discarded())
                ocean::fail(ocean::ErrorCode::parse, "config: invalid JSON document");
        }
        ocean::pipeline::RunConfig cfg(std::move(doc));
        ocean::pipeline::run(command, cfg, std::cout);
    });
}

ocean_status ocean_catalog_json(char** out_json) {
    return guarded([&] {
        if (!out_json) ocean::fail(ocean::ErrorCode::invalid_argument, "out_json is null");
        const std::string s = ocean::pipeline::catalog_as_json().dump(2);
        *out_json = new char[s.size() + 1];
        std::memcpy(*out_json, s.c_str(), s.size() + 1);
    });
}

void ocean_string_free(char* s) { delete[] s; }

ocean_status ocean_lexicon_open(const char* path, ocean_lexicon** out) {
    return guarded([&] {
        if (!path || !out)
            ocean::fail(ocean::ErrorCode::invalid_argument, "path and out must be non-null");
        auto handle = std::make_unique<ocean_lexicon>();
        handle->impl = ocean::Lexicon::load(path);
        *out = handle.release();
    });
}

void ocean_lexicon_close(ocean_lexicon* lex) { delete lex; }

size_t ocean_lexicon_size(const ocean_lexicon* lex) { return lex ? lex->impl.size() : 0; }

ocean_status ocean_lexicon_lookup(const ocean_lexicon* lex, const char* adjective,
                                  double traits[5]) {
    return guarded([&] {
        if (!lex || !adjective || !traits)
            ocean::fail(ocean::ErrorCode::invalid_argument, "lexicon, adjective and traits "
                                                            "must be non-null");
        const ocean::TraitVector* t = lex->impl.find(adjective);
        if (!t)
            ocean::fail(ocean::ErrorCode::not_found,
                        std::string("adjective not in lexicon: ") + adjective);
        for (std::size_t i = 0; i < ocean::TraitVector::kSize; ++i) traits[i] = (*t)[i];
    });
}

ocean_status ocean_lexicon_label(const ocean_lexicon* lex, const char* const* tokens,
                                 size_t count, double traits[5], int bits[5]) {
    return guarded([&] {
        if (!lex || (!tokens && count > 0) || !traits)
            ocean::fail(ocean::ErrorCode::invalid_argument, "lexicon, tokens and traits must "
                                                            "be non-null");
        std::vector<std::string> toks(tokens, tokens + count);
        auto label = lex->impl.match_and_label(toks);
        if (!label)
            ocean::fail(ocean::ErrorCode::not_found, "no lexicon adjective in token sequence");
        for (std::size_t i = 0; i < ocean::TraitVector::kSize; ++i) traits[i] = (*label)[i];
        if (bits) {
            const ocean::BinaryLabels b = ocean::binarize(*label);
            for (std::size_t i = 0; i < ocean::TraitVector::kSize; ++i) bits[i] = b.bits[i];
        }
    });
}

ocean_status ocean_vocab_open(const char* path, ocean_vocab** out) {
    return guarded([&] {
        if (!path || !out)
            ocean::fail(ocean::ErrorCode::invalid_argument, "path and out must be non-null");
        auto handle = std::make_unique<ocean_vocab>();
        handle->impl = ocean::Vocabulary::load(path);
        *out = handle.release();
    });
}

void ocean_vocab_close(ocean_vocab* vocab) { delete vocab; }

size_t ocean_vocab_size(const ocean_vocab* vocab) { return vocab ? vocab->impl.size() : 0; }

int32_t ocean_vocab_encode(const ocean_vocab* vocab, const char* token) {
    if (!vocab || !token) return ocean::Vocabulary::kUnkId;
    return vocab->impl.encode(token);
}

const char* ocean_vocab_decode(const ocean_vocab* vocab, int32_t id) {
    if (!vocab || id < 0 || static_cast<size_t>(id) > vocab->impl.size()) return nullptr;
    return vocab->impl.decode(id).c_str();
}

} // extern "C"
