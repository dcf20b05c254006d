#ifndef BOTSCOPE_H
#define BOTSCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_ARGUMENT = 1,
  BS_STATUS_INVALID_UTF8 = 2,
  BS_STATUS_IO = 3,
  BS_STATUS_INVALID_MODEL = 4,
  BS_STATUS_INVALID_SNAPSHOT = 5,
  BS_STATUS_INVALID_INPUT = 6,
  BS_STATUS_INTERNAL = 7,
} BsStatus;

/**
 * A loaded model suite with its feature registry and lexicons. Opaque.
 */
typedef struct BsSuite BsSuite;

/**
 * The seven scores, each in [0, 1].
 */
typedef struct BsScores {
  double overall;
  double network;
  double user;
  double friends;
  double temporal;
  double content;
  double sentiment;
} BsScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a model suite. `lexicon_dir` may be null to use the built-in
 * sentiment lexicons. On success `*out` owns the suite.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum BsStatus bs_suite_load(const char *model_path, const char *lexicon_dir, struct BsSuite **out);

/**
 * Releases a suite. Null is ignored.
 *
 * # Safety
 * `suite` must be null or a pointer from [`bs_suite_load`] not yet freed.
 */
void bs_suite_free(struct BsSuite *suite);

/**
 * Copies the suite's model version string into `*out`.
 *
 * # Safety
 * `suite` must come from [`bs_suite_load`]; `out` must be writable.
 */
enum BsStatus bs_suite_model_version(const struct BsSuite *suite, char **out);

/**
 * Scores one snapshot document (the JSON accepted by the scoring API).
 *
 * # Safety
 * `suite` must come from [`bs_suite_load`]; `snapshot_json` must be
 * NUL-terminated; `out` must be writable.
 */
enum BsStatus bs_score_snapshot_json(const struct BsSuite *suite,
                                     const char *snapshot_json,
                                     struct BsScores *out);

/**
 * Scores a snapshot and writes the JSON score report to `*out`.
 * `recorded_at` is the report timestamp in Unix seconds; nonzero `detail`
 * adds the tweet and mention times.
 *
 * # Safety
 * As for [`bs_score_snapshot_json`]; free `*out` with [`bs_string_free`].
 */
enum BsStatus bs_score_report_json(const struct BsSuite *suite,
                                   const char *snapshot_json,
                                   int64_t recorded_at,
                                   int32_t detail,
                                   char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void bs_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on the same thread; do not free.
 */
const char *bs_last_error_message(void);

/**
 * Rank (Mann-Whitney) AUC of `n` scores against 0/1 labels.
 *
 * # Safety
 * `scores` and `labels` must point to `n` readable elements; `out` must be
 * writable.
 */
enum BsStatus bs_roc_auc(const double *scores, const uint8_t *labels, size_t n, double *out);

/**
 * Library version, statically allocated.
 */
const char *bs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOTSCOPE_H */
