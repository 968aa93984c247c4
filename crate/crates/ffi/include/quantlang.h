#ifndef QUANTLANG_H
#define QUANTLANG_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Closure operators.
 */
typedef enum QlOperator {
  QL_OPERATOR_MAX = 0,
  QL_OPERATOR_MIN = 1,
  QL_OPERATOR_SUM = 2,
  QL_OPERATOR_COMPLEMENT = 3,
} QlOperator;

/**
 * Status codes.
 */
typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_NULL_ARGUMENT = 1,
  QL_STATUS_INVALID_UTF8 = 2,
  QL_STATUS_PARSE = 3,
  QL_STATUS_NOT_CLOSED = 4,
  QL_STATUS_PRECONDITION = 5,
  QL_STATUS_PANIC = 6,
} QlStatus;

/**
 * Opaque automaton handle.
 */
typedef struct QlAutomaton QlAutomaton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *ql_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void ql_string_free(char *s);

/**
 * Parses an automaton in the text format.
 */
enum QlStatus ql_automaton_parse(const char *text, struct QlAutomaton **out);

/**
 * Loads a shipped fixture by name.
 */
enum QlStatus ql_automaton_fixture(const char *name, struct QlAutomaton **out);

/**
 * Releases an automaton. NULL is ignored.
 */
void ql_automaton_free(struct QlAutomaton *a);

/**
 * Writes the canonical text form of `a` to `*out`.
 */
enum QlStatus ql_automaton_serialize(const struct QlAutomaton *a, char **out);

/**
 * Number of states, or 0 for NULL.
 */
size_t ql_automaton_num_states(const struct QlAutomaton *a);

/**
 * 1 if deterministic, 0 if not or NULL.
 */
int32_t ql_automaton_is_deterministic(const struct QlAutomaton *a);

/**
 * Evaluates `a` on `word` (`u | v` for u·v^ω) and writes the exact value
 * as `p/q` to `*value`.
 */
enum QlStatus ql_eval(const struct QlAutomaton *a, const char *word, char **value);

/**
 * Applies `op`. `b` must be NULL for complement and non-NULL otherwise.
 * A nonzero `nondet` selects the nondeterministic class for deterministic
 * inputs.
 */
enum QlStatus ql_compose(enum QlOperator op,
                         const struct QlAutomaton *a,
                         const struct QlAutomaton *b,
                         int32_t nondet,
                         struct QlAutomaton **out);

/**
 * Automaton for `c + L`; `by` is a rational such as `-3/4`.
 */
enum QlStatus ql_shift(const struct QlAutomaton *a, const char *by, struct QlAutomaton **out);

/**
 * Automaton for `c * L`, `c >= 0`.
 */
enum QlStatus ql_scale(const struct QlAutomaton *a, const char *by, struct QlAutomaton **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUANTLANG_H */
