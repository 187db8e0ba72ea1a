/*
 * ocean — Big Five trait learning from natural-language text.
 *
 * C API over the pipeline core: opaque handles, integer status codes, and a
 * JSON-configured stage runner. Every function returns OCEAN_OK on success;
 * on failure ocean_last_error() holds a thread-local message describing the
 * most recent error in the calling thread.
 */

#ifndef OCEAN_OCEAN_H
#define OCEAN_OCEAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OCEAN_API __declspec(dllexport)
#else
#define OCEAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ocean_status {
    OCEAN_OK = 0,
    OCEAN_ERR_INVALID_ARGUMENT = 1,
    OCEAN_ERR_IO = 2,
    OCEAN_ERR_PARSE = 3,
    OCEAN_ERR_NOT_FOUND = 4,
    OCEAN_ERR_INTERNAL = 5
} ocean_status;

OCEAN_API const char* ocean_version(void);
OCEAN_API const char* ocean_status_name(ocean_status status);

/* Thread-local message for the last failing call; empty string if none. */
OCEAN_API const char* ocean_last_error(void);

/*
 * Pipeline runner. `command` is one of: prep, vocab, embed, train, eval,
 * predict, gradcheck, catalog. `config_json` is the run configuration
 * document (see README); NULL means an empty configuration. Progress and
 * reports are written to stdout.
 */
OCEAN_API ocean_status ocean_run(const char* command, const char* config_json);

/* Model catalog as a JSON array; free with ocean_string_free. */
OCEAN_API ocean_status ocean_catalog_json(char** out_json);
OCEAN_API void ocean_string_free(char* s);

/* ---- adjective lexicon ---- */

typedef struct ocean_lexicon ocean_lexicon;

OCEAN_API ocean_status ocean_lexicon_open(const char* path, ocean_lexicon** out);
OCEAN_API void ocean_lexicon_close(ocean_lexicon* lex);
OCEAN_API size_t ocean_lexicon_size(const ocean_lexicon* lex);

/* traits[5] receives the O,C,E,A,N loadings; OCEAN_ERR_NOT_FOUND when the
 * adjective is not in the dictionary. */
OCEAN_API ocean_status ocean_lexicon_lookup(const ocean_lexicon* lex, const char* adjective,
                                            double traits[5]);

/* Mean trait vector over every matched token plus its binarized labels
 * (bit = 0 iff trait < 0). OCEAN_ERR_NOT_FOUND when no token matches, which
 * marks the sentence as unlabeled. bits may be NULL. */
OCEAN_API ocean_status ocean_lexicon_label(const ocean_lexicon* lex,
                                           const char* const* tokens, size_t count,
                                           double traits[5], int bits[5]);

/* ---- vocabulary ---- */

typedef struct ocean_vocab ocean_vocab;

OCEAN_API ocean_status ocean_vocab_open(const char* path, ocean_vocab** out);
OCEAN_API void ocean_vocab_close(ocean_vocab* vocab);
OCEAN_API size_t ocean_vocab_size(const ocean_vocab* vocab);

/* 0 is the reserved UNK id for out-of-vocabulary tokens. */
OCEAN_API int32_t ocean_vocab_encode(const ocean_vocab* vocab, const char* token);

/* Returns "UNK" for id 0 and NULL for ids outside 0..size. The pointer stays
 * valid for the lifetime of the handle. */
OCEAN_API const char* ocean_vocab_decode(const ocean_vocab* vocab, int32_t id);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OCEAN_OCEAN_H */
