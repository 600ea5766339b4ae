#ifndef GENLANG_H
#define GENLANG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GlGender {
  GL_GENDER_MASC = 0,
  GL_GENDER_FEM = 1,
} GlGender;

/**
 * Sentiment selector; `GL_SENTIMENT_NONE` for sentiment-free models.
 */
typedef enum GlSentiment {
  GL_SENTIMENT_POS = 0,
  GL_SENTIMENT_NEG = 1,
  GL_SENTIMENT_NEU = 2,
  GL_SENTIMENT_NONE = 3,
} GlSentiment;

typedef enum GlStatus {
  GL_STATUS_OK = 0,
  GL_STATUS_NULL_POINTER = 1,
  GL_STATUS_INVALID_ARGUMENT = 2,
  GL_STATUS_IO = 3,
  GL_STATUS_DATA = 4,
  GL_STATUS_NUMERICAL = 5,
  GL_STATUS_PANIC = 6,
} GlStatus;

/**
 * A loaded checkpoint.
 */
typedef struct GlModel GlModel;

/**
 * A ranked neighbor list.
 */
typedef struct GlRanking GlRanking;

typedef struct GlTestResult {
  double statistic;
  double p_value;
  double corrected_alpha;
  bool significant;
  bool exact;
  uint64_t permutations;
} GlTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or an empty string.
 */
const char *gl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gl_version(void);

/**
 * Loads a checkpoint file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GlStatus gl_model_load(const char *path, struct GlModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from [`gl_model_load`] and not be freed twice.
 */
void gl_model_free(struct GlModel *model);

/**
 * Number of neighbor words, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t gl_model_num_neighbors(const struct GlModel *model);

/**
 * Number of sentiment components (1 or 3), or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t gl_model_num_sentiments(const struct GlModel *model);

/**
 * Neighbor word at `index`; null when out of range. The string lives as
 * long as the model.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
const char *gl_model_neighbor(const struct GlModel *model, size_t index);

/**
 * Deviation score of `word` for a gender and sentiment.
 *
 * # Safety
 * `model` must be a live handle, `word` NUL-terminated and `out` writable.
 */
enum GlStatus gl_model_score(const struct GlModel *model,
                             const char *word,
                             enum GlGender gender,
                             enum GlSentiment sentiment,
                             double *out);

/**
 * Posterior probability that `word` collocates with a female noun.
 *
 * # Safety
 * `model` must be a live handle, `word` NUL-terminated and `out` writable.
 */
enum GlStatus gl_model_femaleness(const struct GlModel *model, const char *word, double *out);

/**
 * Ranks neighbors for a gender and sentiment and keeps the top `k`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum GlStatus gl_topk(const struct GlModel *model,
                      enum GlGender gender,
                      enum GlSentiment sentiment,
                      size_t k,
                      struct GlRanking **out);

/**
 * # Safety
 * `ranking` must be null or a live handle.
 */
size_t gl_ranking_len(const struct GlRanking *ranking);

/**
 * Word at `rank` (0-based); null when out of range.
 *
 * # Safety
 * `ranking` must be null or a live handle.
 */
const char *gl_ranking_word(const struct GlRanking *ranking, size_t rank);

/**
 * Score at `rank`; NaN when out of range.
 *
 * # Safety
 * `ranking` must be null or a live handle.
 */
double gl_ranking_score(const struct GlRanking *ranking, size_t rank);

/**
 * # Safety
 * `ranking` must come from [`gl_topk`] and not be freed twice.
 */
void gl_ranking_free(struct GlRanking *ranking);

/**
 * Spearman rank correlation with midrank ties.
 *
 * # Safety
 * `x` and `y` must each point to `n` doubles; `out` must be writable.
 */
enum GlStatus gl_spearman(const double *x, const double *y, size_t n, double *out);

/**
 * Two-sample permutation test on the absolute difference of means.
 *
 * # Safety
 * `a` and `b` must point to `na` and `nb` doubles; `out` must be writable.
 */
enum GlStatus gl_permutation_test(const double *a,
                                  size_t na,
                                  const double *b,
                                  size_t nb,
                                  size_t permutations,
                                  uint64_t seed,
                                  struct GlTestResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENLANG_H */
