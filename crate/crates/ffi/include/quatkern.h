/* SPDX-License-Identifier: Apache-2.0 */

#ifndef QUATKERN_H
#define QUATKERN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum QkStatus {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INVALID_ARGUMENT = 2,
  QK_STATUS_IO = 3,
  QK_STATUS_MALFORMED = 4,
  QK_STATUS_INTERNAL = 5,
} QkStatus;

typedef enum QkKernel {
  QK_KERNEL_DIRECT = 0,
  QK_KERNEL_SQ = 1,
  QK_KERNEL_QT = 2,
  QK_KERNEL_SQT = 3,
} QkKernel;

typedef enum QkFormat {
  QK_FORMAT_JSON = 0,
  QK_FORMAT_DOT = 1,
} QkFormat;

typedef enum QkDirection {
  QK_DIRECTION_FORWARD = 0,
  QK_DIRECTION_INVERSE = 1,
} QkDirection;

typedef enum QkMethod {
  QK_METHOD_NAIVE = 0,
  QK_METHOD_ROW_COL = 1,
} QkMethod;

/**
 * Precomputed constants of `s q`.
 */
typedef struct QkLeftPlan QkLeftPlan;

/**
 * Precomputed constants of `q t`.
 */
typedef struct QkRightPlan QkRightPlan;

/**
 * Precomputed constants of `s q t`.
 */
typedef struct QkTwoSidedPlan QkTwoSidedPlan;

/**
 * Scalar operations of one kernel call.
 */
typedef struct QkOpCount {
  uint64_t mul_count;
  uint64_t add_count;
  uint64_t neg_count;
} QkOpCount;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *qk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qk_version(void);

/**
 * `out = p q` with the 16-multiplication Hamilton product.
 *
 * # Safety
 * `p`, `q` and `out` must each point to four doubles.
 */
enum QkStatus qk_mul_direct(const double *p, const double *q, double *out);

/**
 * # Safety
 * `out` must be a valid pointer. The handle stored there must be released
 * with [`qk_left_plan_free`].
 */
enum QkStatus qk_left_plan_new(double alpha, double beta, struct QkLeftPlan **out);

/**
 * # Safety
 * `plan` must come from [`qk_left_plan_new`] and not be used afterwards. Null is ignored.
 */
void qk_left_plan_free(struct QkLeftPlan *plan);

/**
 * `out = s q` for the plan's `s`.
 *
 * # Safety
 * `plan` must be live; `q` and `out` must each point to four doubles.
 */
enum QkStatus qk_left_mul(const struct QkLeftPlan *plan, const double *q, double *out);

/**
 * # Safety
 * `out` must be a valid pointer. Release the handle with [`qk_right_plan_free`].
 */
enum QkStatus qk_right_plan_new(double gamma, double delta, struct QkRightPlan **out);

/**
 * # Safety
 * `plan` must come from [`qk_right_plan_new`] and not be used afterwards. Null is ignored.
 */
void qk_right_plan_free(struct QkRightPlan *plan);

/**
 * `out = q t` for the plan's `t`.
 *
 * # Safety
 * `plan` must be live; `q` and `out` must each point to four doubles.
 */
enum QkStatus qk_right_mul(const struct QkRightPlan *plan, const double *q, double *out);

/**
 * # Safety
 * `out` must be a valid pointer. Release the handle with [`qk_two_sided_plan_free`].
 */
enum QkStatus qk_two_sided_plan_new(double alpha,
                                    double beta,
                                    double gamma,
                                    double delta,
                                    struct QkTwoSidedPlan **out);

/**
 * # Safety
 * `plan` must come from [`qk_two_sided_plan_new`] and not be used afterwards. Null is ignored.
 */
void qk_two_sided_plan_free(struct QkTwoSidedPlan *plan);

/**
 * `out = s q t` for the plan's `s` and `t`.
 *
 * # Safety
 * `plan` must be live; `q` and `out` must each point to four doubles.
 */
enum QkStatus qk_two_sided_mul(const struct QkTwoSidedPlan *plan, const double *q, double *out);

/**
 * Scalar operations of one call of `kernel`, a [`QkKernel`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QkStatus qk_count_ops(int32_t kernel, struct QkOpCount *out);

/**
 * Netlist of `kernel` ([`QkKernel`]) in `format` ([`QkFormat`]) as a
 * NUL-terminated string. Release it with
 * [`qk_string_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QkStatus qk_netlist_export(int32_t kernel, int32_t format, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void qk_string_free(char *s);

/**
 * Two-sided quaternion Fourier transform of a `rows x cols` image.
 *
 * `direction` is a [`QkDirection`] and `method` a [`QkMethod`]. `input` and
 * `output` hold `rows * cols * 4` doubles, row-major, four components per
 * pixel. They may not overlap.
 *
 * # Safety
 * Both buffers must be valid for `rows * cols * 4` doubles.
 */
enum QkStatus qk_dqft(size_t rows,
                      size_t cols,
                      int32_t direction,
                      int32_t method,
                      const double *input,
                      double *output);

/**
 * Copies the last error into `buf` (truncating, always NUL-terminated) and
 * returns the full message length, or 0 when there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes, or null with `len == 0`.
 */
size_t qk_last_error_copy(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUATKERN_H */
