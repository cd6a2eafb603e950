#ifndef HOPFQ_H
#define HOPFQ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HOPFQ_OK 0

/**
 * A required pointer argument was null.
 */
#define HOPFQ_ERR_NULL 1

/**
 * A string argument was not valid UTF-8.
 */
#define HOPFQ_ERR_UTF8 2

/**
 * Malformed input: JSON schema, scalar syntax, unknown ids.
 */
#define HOPFQ_ERR_INPUT 3

/**
 * Well-formed input describing an invalid quiver or action.
 */
#define HOPFQ_ERR_INVALID 4

/**
 * Parameters violate the constraints of the checked builder.
 */
#define HOPFQ_ERR_CONSTRAINT 5

/**
 * Internal error; the message names the panic.
 */
#define HOPFQ_ERR_INTERNAL 6

/**
 * A quiver with a validated Z_n-action.
 */
typedef struct HopfqSession HopfqSession;

/**
 * A T(n)-action built on a session's quiver.
 */
typedef struct HopfqSpec HopfqSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hopfq_last_error(void);

/**
 * Library version as a static string.
 */
const char *hopfq_version(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hopfq_string_free(char *s);

/**
 * Canonical form of a scalar expression in Q(z), z a primitive 2n-th root.
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `out` must be writable.
 */
int32_t hopfq_scalar_normalize(int64_t n, const char *expr, char **out);

/**
 * Parse a quiver and a Z_n-action (both JSON) and validate the action.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
int32_t hopfq_session_new(const char *quiver_json,
                          const char *action_json,
                          struct HopfqSession **out);

/**
 * # Safety
 * `s` must come from [`hopfq_session_new`] and not have been freed. Null is ignored.
 */
void hopfq_session_free(struct HopfqSession *s);

/**
 * Order n of the session's action.
 *
 * # Safety
 * `s` must be a live session handle.
 */
uint32_t hopfq_session_order(const struct HopfqSession *s);

/**
 * Orbits, minimality and canonically labelled components as JSON.
 *
 * # Safety
 * `s` must be a live session handle; `out` must be writable.
 */
int32_t hopfq_decompose(const struct HopfqSession *s, char **out);

/**
 * Parameter-space report as JSON.
 *
 * # Safety
 * `s` must be a live session handle; `out` must be writable.
 */
int32_t hopfq_parametrize(const struct HopfqSession *s, char **out);

/**
 * Parameters satisfying every reported constraint, as params JSON.
 * The same seed gives the same output.
 *
 * # Safety
 * `s` must be a live session handle; `out` must be writable.
 */
int32_t hopfq_sample(const struct HopfqSession *s, uint64_t seed, size_t attempts, char **out);

/**
 * Build a T(n)-action from params JSON. With `checked` nonzero, parameters
 * violating a constraint give `HOPFQ_ERR_CONSTRAINT`.
 *
 * # Safety
 * `s` must be a live session handle; `params_json` NUL-terminated; `out` writable.
 */
int32_t hopfq_spec_new(const struct HopfqSession *s,
                       const char *params_json,
                       int32_t checked,
                       struct HopfqSpec **out);

/**
 * # Safety
 * `s` must come from [`hopfq_spec_new`] and not have been freed. Null is ignored.
 */
void hopfq_spec_free(struct HopfqSpec *s);

/**
 * Check every relation on paths up to `depth` (0 picks the default).
 * `all_pass` receives 1 or 0; `report_json` receives the report. Either
 * output may be null.
 *
 * # Safety
 * `s` must be a live spec handle; non-null outputs must be writable.
 */
int32_t hopfq_verify(const struct HopfqSpec *s,
                     size_t depth,
                     int32_t *all_pass,
                     char **report_json);

/**
 * Apply generator `g` or `x` to an element such as `"f1*f2 + 1/2*e[v1]"`.
 *
 * # Safety
 * `s` must be a live spec handle; strings NUL-terminated; `out` writable.
 */
int32_t hopfq_act(const struct HopfqSpec *s,
                  const char *generator,
                  const char *element,
                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOPFQ_H */
