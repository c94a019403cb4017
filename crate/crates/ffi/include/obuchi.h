#ifndef OBUCHI_H
#define OBUCHI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum ObuchiStatus {
  ObuchiStatus_Ok = 0,
  ObuchiStatus_NullArgument = 1,
  ObuchiStatus_InvalidUtf8 = 2,
  ObuchiStatus_Parse = 3,
  ObuchiStatus_Validation = 4,
  ObuchiStatus_Usage = 5,
  ObuchiStatus_Internal = 6,
} ObuchiStatus;

/**
 * An ordered Büchi automaton.
 */
typedef struct ObuchiOba ObuchiOba;

/**
 * A parity automaton, possibly the result of determinization.
 */
typedef struct ObuchiParity ObuchiParity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *obuchi_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void obuchi_string_free(char *s);

/**
 * Parses an `ordered-buchi` JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ObuchiStatus obuchi_oba_from_json(const char *json, struct ObuchiOba **out);

/**
 * # Safety
 * `a` must come from this library and not be freed twice.
 */
void obuchi_oba_free(struct ObuchiOba *a);

/**
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_oba_state_count(const struct ObuchiOba *a, size_t *out);

/**
 * Membership of `prefix period^ω`; letters are separated by spaces.
 *
 * # Safety
 * `a` must be a live handle, the strings NUL-terminated and `out` writable.
 */
enum ObuchiStatus obuchi_oba_member(const struct ObuchiOba *a,
                                    const char *prefix,
                                    const char *period,
                                    bool *out);

/**
 * Canonical JSON; release with [`obuchi_string_free`].
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_oba_to_json(const struct ObuchiOba *a, char **out);

/**
 * Determinizes into a deterministic parity automaton.
 *
 * # Safety
 * `a` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_oba_determinize(const struct ObuchiOba *a, struct ObuchiParity **out);

/**
 * Encodes a Rabin condition given as JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ObuchiStatus obuchi_rabin_to_oba(const char *json, struct ObuchiOba **out);

/**
 * Parses a `parity` or `det-parity` JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ObuchiStatus obuchi_parity_from_json(const char *json, struct ObuchiParity **out);

/**
 * # Safety
 * `p` must come from this library and not be freed twice.
 */
void obuchi_parity_free(struct ObuchiParity *p);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_parity_state_count(const struct ObuchiParity *p, size_t *out);

/**
 * Membership of `prefix period^ω`, with ε-closure for nondeterministic
 * automata.
 *
 * # Safety
 * `p` must be a live handle, the strings NUL-terminated and `out` writable.
 */
enum ObuchiStatus obuchi_parity_member(const struct ObuchiParity *p,
                                       const char *prefix,
                                       const char *period,
                                       bool *out);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_parity_to_json(const struct ObuchiParity *p, char **out);

/**
 * Translates an ε-complete parity automaton.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum ObuchiStatus obuchi_parity_to_oba(const struct ObuchiParity *p, struct ObuchiOba **out);

/**
 * Number of records over `n` states.
 *
 * # Safety
 * `out` must be writable.
 */
enum ObuchiStatus obuchi_record_count_bound(size_t n, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OBUCHI_H */
