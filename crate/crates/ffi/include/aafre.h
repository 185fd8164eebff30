#ifndef AAFRE_H
#define AAFRE_H

/* Generated by cbindgen from the aafre-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AafreStatus {
  AAFRE_STATUS_OK = 0,
  /**
   * The system has no solution, so the requested value does not exist.
   */
  AAFRE_STATUS_INFEASIBLE = 1,
  AAFRE_STATUS_INVALID_INPUT = 2,
  AAFRE_STATUS_SIZE_LIMIT = 3,
  AAFRE_STATUS_NULL_POINTER = 4,
  AAFRE_STATUS_BUFFER_TOO_SMALL = 5,
  AAFRE_STATUS_INTERNAL = 6,
} AafreStatus;

/**
 * Opaque instance handle.
 */
typedef struct AafreInstance AafreInstance;

/**
 * Opaque optimization report handle.
 */
typedef struct AafreReport AafreReport;

typedef struct AafreSolveOptions {
  bool prune;
  bool all_optima;
  /**
   * 0 for no limit.
   */
  uint64_t max_candidates;
  /**
   * 0 for the default thread pool.
   */
  size_t workers;
} AafreSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *aafre_last_error_message(void);

/**
 * Parses a JSON instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AafreStatus aafre_instance_from_json(const char *json, struct AafreInstance **out);

/**
 * Builds an instance from a row-major `m x n` matrix `a`, `b` of length
 * `m` and `c` of length `n`. A negative `tol` selects the default.
 *
 * # Safety
 * The arrays must hold the stated number of elements and `out` must be a
 * valid pointer.
 */
enum AafreStatus aafre_instance_new(const double *a,
                                    size_t m,
                                    size_t n,
                                    const double *b,
                                    const double *c,
                                    double lambda,
                                    double tol,
                                    struct AafreInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from this library not yet freed.
 */
void aafre_instance_free(struct AafreInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle.
 */
enum AafreStatus aafre_instance_dims(const struct AafreInstance *inst, size_t *m, size_t *n);

/**
 * Solves the instance. An infeasible system still yields a report, with
 * `aafre_report_feasible` false. `opts` may be null for defaults.
 *
 * # Safety
 * `inst` must be a live handle, `opts` null or valid, `out` valid.
 */
enum AafreStatus aafre_solve(const struct AafreInstance *inst,
                             const struct AafreSolveOptions *opts,
                             struct AafreReport **out);

/**
 * # Safety
 * `report` must be null or a handle from this library not yet freed.
 */
void aafre_report_free(struct AafreReport *report);

/**
 * False for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool aafre_report_feasible(const struct AafreReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` valid.
 */
enum AafreStatus aafre_report_z_star(const struct AafreReport *report, double *out);

/**
 * Copies the optimal point into `buf`, which must hold `n` values.
 *
 * # Safety
 * `report` must be a live handle and `buf` must hold `len` values.
 */
enum AafreStatus aafre_report_x_star(const struct AafreReport *report, double *buf, size_t len);

/**
 * Copies the greatest solution (or its candidate when infeasible) into
 * `buf`, which must hold `n` values.
 *
 * # Safety
 * `report` must be a live handle and `buf` must hold `len` values.
 */
enum AafreStatus aafre_report_xbar(const struct AafreReport *report, double *buf, size_t len);

/**
 * Copies the 1-based optimal selection into `buf`, which must hold `m`
 * values.
 *
 * # Safety
 * `report` must be a live handle and `buf` must hold `len` values.
 */
enum AafreStatus aafre_report_e_star(const struct AafreReport *report, size_t *buf, size_t len);

/**
 * The report as a JSON document, or null on failure. Release with
 * `aafre_string_free`.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *aafre_report_to_json(const struct AafreReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void aafre_string_free(char *s);

/**
 * `T(a, x)` for the given exponent.
 *
 * # Safety
 * `out` must be valid.
 */
enum AafreStatus aafre_tnorm_eval(double a, double x, double lambda, double *out);

/**
 * The `x` with `T(a, x) = b`, for `a >= b > 0`.
 *
 * # Safety
 * `out` must be valid.
 */
enum AafreStatus aafre_tnorm_residual(double a, double b, double lambda, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AAFRE_H */
