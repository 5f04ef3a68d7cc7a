/* C ABI for the coref-eval toolkit. */

#ifndef COREF_EVAL_H
#define COREF_EVAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes, mirroring the CLI exit codes.
 */
typedef enum CorefEvalStatus {
  /**
   * Success.
   */
  CorefEvalOk = 0,
  /**
   * Invalid arguments or configuration (including unreadable files).
   */
  CorefEvalUsageError = 1,
  /**
   * Parse or alignment failure in an input file.
   */
  CorefEvalParseError = 2,
  /**
   * Internal invariant violation (including caught panics).
   */
  CorefEvalInternalError = 3,
} CorefEvalStatus;

/**
 * Opaque parsed corpus handle.
 */
typedef struct CorefEvalCorpus CorefEvalCorpus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a corpus (and optional dependency sidecar) from in-memory text.
 * `parse_text` may be NULL. When `apply_scope_filter` is true,
 * discontinuous mentions and singleton clusters are removed, matching
 * the scoring scope.
 *
 * # Safety
 * Pointer arguments must satisfy the conventions in the module docs.
 */
enum CorefEvalStatus coref_eval_corpus_parse(const char *gold_text,
                                             const char *parse_text,
                                             bool apply_scope_filter,
                                             struct CorefEvalCorpus **out);

/**
 * Loads a corpus from a bracket-format file plus an optional dependency
 * sidecar path (NULL to skip).
 *
 * # Safety
 * Pointer arguments must satisfy the conventions in the module docs.
 */
enum CorefEvalStatus coref_eval_corpus_load(const char *gold_path,
                                            const char *parse_path,
                                            bool apply_scope_filter,
                                            struct CorefEvalCorpus **out);

/**
 * Number of documents in the corpus; 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle returned by a constructor.
 */
uint64_t coref_eval_corpus_document_count(const struct CorefEvalCorpus *corpus);

/**
 * Releases a corpus handle. NULL is a no-op.
 *
 * # Safety
 * `corpus` must be NULL or a handle returned by a constructor, not yet
 * freed.
 */
void coref_eval_corpus_free(struct CorefEvalCorpus *corpus);

/**
 * Scores `pred` against `gold` (documents matched by id) and writes a
 * JSON report with the mention-, link-, and entity-based triples plus
 * the averaged score.
 *
 * # Safety
 * Pointer arguments must satisfy the conventions in the module docs.
 */
enum CorefEvalStatus coref_eval_score_json(const struct CorefEvalCorpus *gold,
                                           const struct CorefEvalCorpus *pred,
                                           char **out_json);

/**
 * As [`coref_eval_score_json`], adding type-restricted triples for a
 * comma-separated list of type names (e.g. `"nested,on_generic"`).
 * Typed scoring requires the gold corpus to carry parse layers.
 *
 * # Safety
 * Pointer arguments must satisfy the conventions in the module docs.
 */
enum CorefEvalStatus coref_eval_typed_score_json(const struct CorefEvalCorpus *gold,
                                                 const struct CorefEvalCorpus *pred,
                                                 const char *types_csv,
                                                 char **out_json);

/**
 * Releases a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void coref_eval_string_free(char *s);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next library call on the same thread; do not free it.
 */
const char *coref_eval_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COREF_EVAL_H */
