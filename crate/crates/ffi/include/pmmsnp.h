#ifndef PMMSNP_H
#define PMMSNP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PMMSNP_STATUS_OK = 0,
  PMMSNP_STATUS_PROMISE_VIOLATION = 1,
  PMMSNP_STATUS_NO_CONTAINMENT = 2,
  PMMSNP_STATUS_INVALID_ARGUMENT = 3,
  PMMSNP_STATUS_BUDGET_EXCEEDED = 4,
  PMMSNP_STATUS_PARSE_ERROR = 5,
  PMMSNP_STATUS_NULL_POINTER = 6,
  PMMSNP_STATUS_PANIC = 7,
} PmmsnpStatus;

typedef enum {
  PMMSNP_VERDICT_NO_CONTAINMENT = 0,
  PMMSNP_VERDICT_TRACTABLE_AIP = 1,
  PMMSNP_VERDICT_HARD_UNDER_RICH2TO1 = 2,
} PmmsnpVerdict;

/**
 * Opaque uniform hypergraph.
 */
typedef struct PmmsnpHypergraph PmmsnpHypergraph;

/**
 * Opaque relational structure.
 */
typedef struct PmmsnpStructure PmmsnpStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *pmmsnp_last_error(void);

/**
 * Classifies `(c, d, k, l)`. `out_boundary` (may be null) receives `c(k−1)`.
 *
 * # Safety
 * `out_verdict` must be a valid pointer; `out_boundary` must be valid or null.
 */
PmmsnpStatus pmmsnp_classify(uintptr_t c,
                             uintptr_t d,
                             uintptr_t k,
                             uintptr_t l,
                             PmmsnpVerdict *out_verdict,
                             uintptr_t *out_boundary);

/**
 * Parses a structure from JSON `{"domain": n, "relations": {...}}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
PmmsnpStatus pmmsnp_structure_from_json(const char *json, PmmsnpStructure **out);

/**
 * # Safety
 * `s` must come from [`pmmsnp_structure_from_json`] and not be freed twice.
 */
void pmmsnp_structure_free(PmmsnpStructure *s);

/**
 * # Safety
 * `s` must be a live handle or null (which yields 0).
 */
uintptr_t pmmsnp_structure_domain_size(const PmmsnpStructure *s);

/**
 * Serializes a structure to a newly allocated JSON string, released with
 * [`pmmsnp_string_free`]. Returns null on a null handle.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
char *pmmsnp_structure_to_json(const PmmsnpStructure *s);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pmmsnp_string_free(char *s);

/**
 * Sets `out` to whether every set of at most `bound` tuples spans more
 * elements than the sum of their arities minus one.
 *
 * # Safety
 * `s` must be a live handle; `out` must be a valid pointer.
 */
PmmsnpStatus pmmsnp_girth_exceeds(const PmmsnpStructure *s, uintptr_t bound, bool *out);

/**
 * Reconfigurability and all-splits BKLM-connectedness of a named relation
 * such as `"nae:2:3"`. Either output pointer may be null.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; outputs must be valid or null.
 */
PmmsnpStatus pmmsnp_relation_connectivity(const char *spec,
                                          bool *out_reconfigurable,
                                          bool *out_bklm);

/**
 * Parses a hypergraph from JSON `{"variables": n, "arity": r, "edges": [...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
PmmsnpStatus pmmsnp_hypergraph_from_json(const char *json, PmmsnpHypergraph **out);

/**
 * # Safety
 * `h` must come from [`pmmsnp_hypergraph_from_json`] and not be freed twice.
 */
void pmmsnp_hypergraph_free(PmmsnpHypergraph *h);

/**
 * # Safety
 * `h` must be a live handle or null (which yields 0).
 */
uintptr_t pmmsnp_hypergraph_variables(const PmmsnpHypergraph *h);

/**
 * Solves a tractable instance, writing one colour per variable into
 * `out_colours`, which must hold `out_len ≥ variables` entries.
 *
 * # Safety
 * `h` must be a live handle; `out_colours` must point to `out_len` writable
 * entries.
 */
PmmsnpStatus pmmsnp_solve_tractable(const PmmsnpHypergraph *h,
                                    uintptr_t c,
                                    uintptr_t d,
                                    uintptr_t k,
                                    uintptr_t l,
                                    uintptr_t *out_colours,
                                    uintptr_t out_len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PMMSNP_H */
