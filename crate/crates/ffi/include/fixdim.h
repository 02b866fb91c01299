#ifndef FIXDIM_H
#define FIXDIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum FixdimStatus {
  FIXDIM_STATUS_OK = 0,
  FIXDIM_STATUS_DIMENSION = 1,
  FIXDIM_STATUS_PARAM = 2,
  FIXDIM_STATUS_NUMERIC = 3,
  FIXDIM_STATUS_RANK_DEFICIENT = 4,
  FIXDIM_STATUS_FORMAT = 5,
  FIXDIM_STATUS_IO = 6,
  FIXDIM_STATUS_NULL_POINTER = 7,
  FIXDIM_STATUS_PANIC = 8,
} FixdimStatus;

typedef enum FixdimSketch {
  FIXDIM_SKETCH_SRHT = 0,
  FIXDIM_SKETCH_ITERATED_SRHT2 = 1,
  FIXDIM_SKETCH_GAUSSIAN = 2,
  FIXDIM_SKETCH_COUNT_SKETCH = 3,
} FixdimSketch;

typedef enum FixdimPipeline {
  FIXDIM_PIPELINE_WC_BASIS_L2 = 0,
  FIXDIM_PIPELINE_WC_BASIS_L1 = 1,
  FIXDIM_PIPELINE_COUNT_SKETCH_BASIS = 2,
  FIXDIM_PIPELINE_LEWIS = 3,
  FIXDIM_PIPELINE_UNIFORM = 4,
} FixdimPipeline;

/**
 * Opaque dense row-major matrix.
 */
typedef struct FixdimMatrix FixdimMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *fixdim_last_error(void);

/**
 * Copies `rows * cols` row-major values into a new matrix.
 *
 * # Safety
 * `data` must point to `rows * cols` readable doubles; `out` must be writable.
 */
enum FixdimStatus fixdim_matrix_new(size_t rows,
                                    size_t cols,
                                    const double *data,
                                    struct FixdimMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a handle returned by this library, not yet freed.
 */
void fixdim_matrix_free(struct FixdimMatrix *m);

/**
 * # Safety
 * `m` must be a live handle.
 */
size_t fixdim_matrix_rows(const struct FixdimMatrix *m);

/**
 * # Safety
 * `m` must be a live handle.
 */
size_t fixdim_matrix_cols(const struct FixdimMatrix *m);

/**
 * Copies the row-major entries into `out`, which must hold exactly
 * `rows * cols` values.
 *
 * # Safety
 * `m` must be a live handle and `out` must point to `len` writable doubles.
 */
enum FixdimStatus fixdim_matrix_copy(const struct FixdimMatrix *m, double *out, size_t len);

/**
 * Reads a `.csv` or `.mtb` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum FixdimStatus fixdim_matrix_read(const char *path, struct FixdimMatrix **out);

/**
 * # Safety
 * `m` must be a live handle; `path` must be a NUL-terminated string.
 */
enum FixdimStatus fixdim_matrix_write(const struct FixdimMatrix *m, const char *path);

/**
 * d × d embedding with an SRHT sized for an `eps`-JLT with probability
 * `1 − 1/t`.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum FixdimStatus fixdim_embed_l2(const struct FixdimMatrix *a,
                                  double eps,
                                  double t,
                                  uint64_t seed,
                                  struct FixdimMatrix **out);

/**
 * d × d embedding through an explicit sketch with `rows` rows.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum FixdimStatus fixdim_embed_l2_sketch(const struct FixdimMatrix *a,
                                         enum FixdimSketch kind,
                                         size_t rows,
                                         uint64_t seed,
                                         struct FixdimMatrix **out);

/**
 * `(d + r) × d` ℓ1 embedding. `q = 0` selects `r = ⌈80 d ln(td)⌉`;
 * `q ≥ 3` selects `r = ⌈100 d ln^{1+1/q}(td)⌉`.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum FixdimStatus fixdim_embed_l1(const struct FixdimMatrix *a,
                                  double t,
                                  double q,
                                  uint64_t seed,
                                  struct FixdimMatrix **out);

/**
 * Approximate leverage scores into `out` (length `rows(a)`), using an
 * SRHT with `rows` rows and no Gaussian compression.
 *
 * # Safety
 * `a` must be a live handle; `out` must point to `len` writable doubles.
 */
enum FixdimStatus fixdim_leverage(const struct FixdimMatrix *a,
                                  size_t rows,
                                  uint64_t seed,
                                  double *out,
                                  size_t len);

/**
 * Lewis weights by exact leverage scores. `iters = 0` uses
 * `⌈2 log₂ log₂ n⌉`.
 *
 * # Safety
 * `a` must be a live handle; `out` must point to `len` writable doubles.
 */
enum FixdimStatus fixdim_lewis_weights(const struct FixdimMatrix *a,
                                       size_t iters,
                                       double *out,
                                       size_t len);

/**
 * Sketched least squares `min ‖Ax − b‖₂` through an SRHT with `rows` rows.
 * Writes `x` (length `cols(a)`) and, if `cost` is non-NULL, `‖Ax − b‖₂²`.
 *
 * # Safety
 * `a` must be a live handle; `b` must hold `b_len` doubles; `x` must hold
 * `x_len` doubles; `cost` may be NULL.
 */
enum FixdimStatus fixdim_regress_l2(const struct FixdimMatrix *a,
                                    const double *b,
                                    size_t b_len,
                                    size_t rows,
                                    uint64_t seed,
                                    double *x,
                                    size_t x_len,
                                    double *cost);

/**
 * Coreset ℓ1 regression. `rows = 0` uses the pipeline's default coreset
 * size (not allowed for the uniform pipeline). Writes `x` and, if `cost`
 * is non-NULL, `‖Ax − b‖₁`.
 *
 * # Safety
 * As for [`fixdim_regress_l2`].
 */
enum FixdimStatus fixdim_regress_l1(const struct FixdimMatrix *a,
                                    const double *b,
                                    size_t b_len,
                                    enum FixdimPipeline pipeline,
                                    size_t rows,
                                    double eps,
                                    uint64_t seed,
                                    double *x,
                                    size_t x_len,
                                    double *cost);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXDIM_H */
