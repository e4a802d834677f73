#ifndef REFCLASS_H
#define REFCLASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Generation scheme codes for [`RcConfig::scheme`].
 */
#define RC_SCHEME_M1 1

#define RC_SCHEME_M2 2

#define RC_SCHEME_M3 3

/**
 * Counting codes for [`RcConfig::counting`].
 */
#define RC_COUNTING_FULL 0

#define RC_COUNTING_WEIGHTED 1

/**
 * Values of the `source` out-parameter of [`rc_classification_get`].
 */
#define RC_SOURCE_REFERENCE_BASED 0

#define RC_SOURCE_JOURNAL_FALLBACK 1

typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  RC_STATUS_IO = 3,
  RC_STATUS_PARSE = 4,
  RC_STATUS_INVALID_INPUT = 5,
  RC_STATUS_OUT_OF_RANGE = 6,
  RC_STATUS_EMPTY_INTERSECTION = 7,
  RC_STATUS_PANIC = 99,
} RcStatus;

typedef struct RcClassification RcClassification;

typedef struct RcCorpus RcCorpus;

typedef struct RcScheme RcScheme;

/**
 * One classification configuration.
 */
typedef struct RcConfig {
  uint32_t scheme;
  uint32_t counting;
  bool averaged;
  double threshold;
  uint32_t max_categories;
  uint32_t min_active_refs;
  double gen1_weight;
  double gen2_weight;
} RcConfig;

typedef struct RcEntry {
  uint32_t category_code;
  double weight;
} RcEntry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rc_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *rc_last_error_message(void);

/**
 * The M3-AWC-0.8 configuration with the standard weights, cap and gate.
 */
struct RcConfig rc_config_default(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RcStatus rc_scheme_load(const char *path, struct RcScheme **out);

/**
 * # Safety
 * `scheme` must be null or a handle from [`rc_scheme_load`], not yet freed.
 */
void rc_scheme_free(struct RcScheme *scheme);

/**
 * Number of target categories; 0 for a null handle.
 *
 * # Safety
 * `scheme` must be null or a live handle.
 */
size_t rc_scheme_target_count(const struct RcScheme *scheme);

/**
 * # Safety
 * Paths must be NUL-terminated strings, `scheme` a live handle and `out`
 * writable.
 */
enum RcStatus rc_corpus_ingest(const char *papers,
                               const char *journals,
                               const char *edges,
                               const struct RcScheme *scheme,
                               struct RcCorpus **out);

/**
 * # Safety
 * `corpus` must be null or a handle from [`rc_corpus_ingest`], not yet freed.
 */
void rc_corpus_free(struct RcCorpus *corpus);

/**
 * # Safety
 * `corpus` must be null or a live handle.
 */
size_t rc_corpus_paper_count(const struct RcCorpus *corpus);

/**
 * Classifies every citable paper of `corpus` under `config`.
 *
 * # Safety
 * Handles must be live, `config` readable and `out` writable.
 */
enum RcStatus rc_classify(const struct RcCorpus *corpus,
                          const struct RcScheme *scheme,
                          const struct RcConfig *config,
                          struct RcClassification **out);

/**
 * Journal-based classification; `threshold <= 0` leaves it untruncated.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum RcStatus rc_asjc_baseline(const struct RcCorpus *corpus,
                               const struct RcScheme *scheme,
                               double threshold,
                               struct RcClassification **out);

/**
 * # Safety
 * `c` must be null or a live handle.
 */
size_t rc_classification_len(const struct RcClassification *c);

/**
 * Paper id, number of entries and source of the `index`-th assignment
 * (papers in ascending id order).
 *
 * # Safety
 * `c` must be a live handle and the out-pointers writable.
 */
enum RcStatus rc_classification_get(const struct RcClassification *c,
                                    size_t index,
                                    uint64_t *paper_id,
                                    size_t *entries,
                                    uint32_t *source);

/**
 * Entry `rank` (0-based, heaviest first) of the `index`-th assignment.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum RcStatus rc_classification_entry(const struct RcClassification *c,
                                      size_t index,
                                      size_t rank,
                                      struct RcEntry *out);

/**
 * Writes `paper_id,rank,category_code,weight,source` rows to `path`.
 *
 * # Safety
 * `c` must be a live handle and `path` a NUL-terminated string.
 */
enum RcStatus rc_classification_write_csv(const struct RcClassification *c, const char *path);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void rc_classification_free(struct RcClassification *c);

/**
 * Percentage weight overlap of `test` with `gold` over their shared papers.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum RcStatus rc_coincidence(const struct RcClassification *test,
                             const struct RcClassification *gold,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REFCLASS_H */
