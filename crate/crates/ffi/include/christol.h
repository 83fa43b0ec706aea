#ifndef CHRISTOL_H
#define CHRISTOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum ChristolStatus {
  CHRISTOL_STATUS_OK = 0,
  CHRISTOL_STATUS_NULL_POINTER = 1,
  CHRISTOL_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad input: parse errors, invalid fields, inseparable curves.
   */
  CHRISTOL_STATUS_USER_ERROR = 3,
  /**
   * A cap was hit: state limit, precision exhausted, search caps.
   */
  CHRISTOL_STATUS_REFUSAL = 4,
  /**
   * An internal invariant failed.
   */
  CHRISTOL_STATUS_INTERNAL = 5,
  /**
   * A panic was caught at the boundary.
   */
  CHRISTOL_STATUS_PANIC = 6,
} ChristolStatus;

/**
 * Reading direction of an automaton.
 */
typedef enum ChristolConvention {
  CHRISTOL_CONVENTION_REVERSE = 0,
  CHRISTOL_CONVENTION_FORWARD = 1,
} ChristolConvention;

/**
 * A minimal automaton.
 */
typedef struct ChristolAutomaton ChristolAutomaton;

/**
 * A plane curve over a finite field together with one branch at the origin.
 */
typedef struct ChristolCurve ChristolCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *christol_last_error(void);

/**
 * Builds a curve over `F_{p^r}` (default modulus) from an expression in `x`
 * and `T`, and expands the branch with constant term `a0` to `precision`
 * coefficients. A negative `a0` selects the unique simple root at the
 * origin.
 *
 * # Safety
 * `expr` must be a nul-terminated string and `out` a valid pointer.
 */
enum ChristolStatus christol_curve_new(uint32_t p,
                                       uint32_t r,
                                       const char *expr,
                                       int64_t a0,
                                       size_t precision,
                                       struct ChristolCurve **out);

/**
 * # Safety
 * `curve` must come from [`christol_curve_new`] and not be freed twice.
 */
void christol_curve_free(struct ChristolCurve *curve);

/**
 * Copies the first `len` branch coefficients (as element codes) into
 * `coeffs`; `len` may not exceed the precision given at construction.
 *
 * # Safety
 * `coeffs` must point to `len` writable `u32`s.
 */
enum ChristolStatus christol_curve_expand(const struct ChristolCurve *curve,
                                          uint32_t *coeffs,
                                          size_t len);

/**
 * Number of kernel states of the branch.
 *
 * # Safety
 * `curve` and `out` must be valid pointers.
 */
enum ChristolStatus christol_curve_kernel_size(const struct ChristolCurve *curve,
                                               size_t max_states,
                                               size_t *out);

/**
 * Minimal automaton of the branch in the given reading direction.
 *
 * # Safety
 * `curve` and `out` must be valid pointers.
 */
enum ChristolStatus christol_automaton_build(const struct ChristolCurve *curve,
                                             enum ChristolConvention convention,
                                             size_t max_states,
                                             struct ChristolAutomaton **out);

/**
 * # Safety
 * `automaton` must come from [`christol_automaton_build`] and not be freed
 * twice.
 */
void christol_automaton_free(struct ChristolAutomaton *automaton);

/**
 * # Safety
 * `automaton` and `out` must be valid pointers.
 */
enum ChristolStatus christol_automaton_n_states(const struct ChristolAutomaton *automaton,
                                                size_t *out);

/**
 * Output of the automaton on the base-q digits of `n`, as an element code.
 *
 * # Safety
 * `automaton` and `out` must be valid pointers.
 */
enum ChristolStatus christol_automaton_eval(const struct ChristolAutomaton *automaton,
                                            uint64_t n,
                                            uint32_t *out);

/**
 * JSON serialization; release with [`christol_string_free`].
 *
 * # Safety
 * `automaton` and `out` must be valid pointers.
 */
enum ChristolStatus christol_automaton_to_json(const struct ChristolAutomaton *automaton,
                                               char **out);

/**
 * Graphviz DOT rendering; release with [`christol_string_free`].
 *
 * # Safety
 * `automaton` and `out` must be valid pointers.
 */
enum ChristolStatus christol_automaton_to_dot(const struct ChristolAutomaton *automaton,
                                              char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void christol_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHRISTOL_H */
