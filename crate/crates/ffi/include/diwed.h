#ifndef DIWED_H
#define DIWED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DIWED_STATUS_OK = 0,
  DIWED_STATUS_NULL_POINTER = 1,
  DIWED_STATUS_INVALID_ARGUMENT = 2,
  DIWED_STATUS_NOT_FOUND = 3,
  DIWED_STATUS_NUMERICAL = 4,
  DIWED_STATUS_PANIC = 5,
} DiwedStatus;

/**
 * A Bell expression owned by the library.
 */
typedef struct DiwedExpression DiwedExpression;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *diwed_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *diwed_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void diwed_string_free(char *s);

/**
 * Looks up a catalog inequality such as `RG4` or `RG3_full`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
DiwedStatus diwed_catalog_new(const char *name, DiwedExpression **out);

/**
 * The γ-witness `S_{n,γ}`.
 *
 * # Safety
 * `out` must be writable.
 */
DiwedStatus diwed_gamma_witness_new(size_t n, double gamma, DiwedExpression **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
DiwedStatus diwed_expression_from_json(const char *json, DiwedExpression **out);

/**
 * Serializes the expression; free the result with [`diwed_string_free`].
 *
 * # Safety
 * `expr` must be a live handle; `out` must be writable.
 */
DiwedStatus diwed_expression_to_json(const DiwedExpression *expr, char **out);

/**
 * # Safety
 * `expr` must be a live handle; `out` must be writable.
 */
DiwedStatus diwed_expression_party_count(const DiwedExpression *expr, size_t *out);

/**
 * # Safety
 * `expr` must be null or a handle from this library, not yet freed.
 */
void diwed_expression_free(DiwedExpression *expr);

/**
 * Exact local bound.
 *
 * # Safety
 * `expr` must be a live handle; `out` must be writable.
 */
DiwedStatus diwed_local_bound(const DiwedExpression *expr, double *out);

/**
 * Optimal GHZ value of `S_{n,γ}` and the angle achieving it.
 *
 * # Safety
 * `out_phi` and `out_value` must be writable.
 */
DiwedStatus diwed_quantum_bound(size_t n, double gamma, double *out_phi, double *out_value);

/**
 * See-saw lower bound over qubit strategies. `k = 0` or `k ≥ n` leaves the
 * state unrestricted; otherwise the state is k-producible.
 *
 * # Safety
 * `expr` must be a live handle; `out` must be writable.
 */
DiwedStatus diwed_seesaw(const DiwedExpression *expr,
                         size_t k,
                         size_t restarts,
                         uint64_t seed,
                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIWED_H */
