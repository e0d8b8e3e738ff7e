#ifndef MORPHIC_H
#define MORPHIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MorphicStatus {
  MORPHIC_STATUS_OK = 0,
  MORPHIC_STATUS_SYNTAX = 1,
  MORPHIC_STATUS_ALPHABET = 2,
  MORPHIC_STATUS_DOMAIN = 3,
  MORPHIC_STATUS_RESOURCE = 4,
  MORPHIC_STATUS_IO = 5,
  MORPHIC_STATUS_NULL_POINTER = 6,
  MORPHIC_STATUS_INVALID_UTF8 = 7,
  MORPHIC_STATUS_PANIC = 8,
} MorphicStatus;

/*
 Opaque constraint-set handle.
 */
typedef struct MorphicConstraints MorphicConstraints;

/*
 Opaque formula handle.
 */
typedef struct MorphicFormula MorphicFormula;

/*
 Opaque morphism handle.
 */
typedef struct MorphicMorphism MorphicMorphism;

/*
 Opaque word handle.
 */
typedef struct MorphicWord MorphicWord;

/*
 A violation `word[start..end)`; `kind` follows the order of
 `MorphicViolationKind`.
 */
typedef struct MorphicViolation {
  uint32_t kind;
  size_t start;
  size_t end;
} MorphicViolation;

typedef struct MorphicSearchResult {
  /*
   True when the language is finite and `max_length` is exact.
   */
  bool exhausted;
  size_t max_length;
  uint64_t tree_nodes;
} MorphicSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread; empty after success. The
 pointer stays valid until the next call into the library on this thread.
 */
const char *morphic_last_error_message(void);

/*
 # Safety
 `s` is null or was returned by this library and not yet freed.
 */
void morphic_string_free(char *s);

/*
 # Safety
 `text` is a NUL-terminated string; `out` is writable.
 */
enum MorphicStatus morphic_word_parse(const char *text_, struct MorphicWord **out_);

/*
 # Safety
 `w` is null or a live handle.
 */
void morphic_word_free(struct MorphicWord *w);

/*
 Length of `w`, or 0 for a null handle.

 # Safety
 `w` is null or a live handle.
 */
size_t morphic_word_len(const struct MorphicWord *w);

/*
 # Safety
 `w` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_word_to_string(const struct MorphicWord *w, char **out_);

/*
 Parses slash-separated images such as `"01/0"`.

 # Safety
 `text` is a NUL-terminated string; `out` is writable.
 */
enum MorphicStatus morphic_morphism_parse(const char *text_, struct MorphicMorphism **out_);

/*
 # Safety
 `m` is null or a live handle.
 */
void morphic_morphism_free(struct MorphicMorphism *m);

/*
 # Safety
 `m` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_morphism_to_string(const struct MorphicMorphism *m, char **out_);

/*
 `outer ∘ inner`.

 # Safety
 Both handles are live; `out` is writable.
 */
enum MorphicStatus morphic_morphism_compose(const struct MorphicMorphism *outer,
                                            const struct MorphicMorphism *inner,
                                            struct MorphicMorphism **out_);

/*
 # Safety
 Both handles are live; `out` is writable.
 */
enum MorphicStatus morphic_morphism_apply(const struct MorphicMorphism *m,
                                          const struct MorphicWord *w,
                                          struct MorphicWord **out_);

/*
 Length-`n` prefix of the fixed point of `m` starting with 0.

 # Safety
 `m` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_fixed_point_prefix(const struct MorphicMorphism *m,
                                              size_t n,
                                              struct MorphicWord **out_);

/*
 Length-`n` prefix of `g` applied to the fixed point of `f`.

 # Safety
 Both handles are live; `out` is writable.
 */
enum MorphicStatus morphic_morphic_prefix(const struct MorphicMorphism *g,
                                          const struct MorphicMorphism *f,
                                          size_t n,
                                          struct MorphicWord **out_);

/*
 Distinct squares of `w`, one per line in ascending order.

 # Safety
 `w` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_distinct_squares(const struct MorphicWord *w, char **out_);

/*
 Distinct minimal overlaps of `w`, one per line in ascending order.

 # Safety
 `w` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_distinct_overlaps(const struct MorphicWord *w, char **out_);

/*
 Looks for a square of period at least `t`; on a hit, `found` is set and
 `start`/`period` locate it.

 # Safety
 `w` is a live handle; the out pointers are writable.
 */
enum MorphicStatus morphic_find_sq_t(const struct MorphicWord *w,
                                     size_t t,
                                     bool *found,
                                     size_t *start,
                                     size_t *period);

/*
 Largest exponent `num/den` of a factor of a non-empty `w`, in lowest terms.

 # Safety
 `w` is a live handle; the out pointers are writable.
 */
enum MorphicStatus morphic_max_exponent(const struct MorphicWord *w, uint64_t *num, uint64_t *den);

/*
 Parses a formula such as `"AA.ABAB.BB"`.

 # Safety
 `text` is a NUL-terminated string; `out` is writable.
 */
enum MorphicStatus morphic_formula_parse(const char *text_, struct MorphicFormula **out_);

/*
 # Safety
 `f` is null or a live handle.
 */
void morphic_formula_free(struct MorphicFormula *f);

/*
 # Safety
 Both handles are live; `out` is writable.
 */
enum MorphicStatus morphic_avoids(const struct MorphicWord *w,
                                  const struct MorphicFormula *f,
                                  bool *out_);

/*
 Parses a constraint file body.

 # Safety
 `text` is a NUL-terminated string; `out` is writable.
 */
enum MorphicStatus morphic_constraints_parse(const char *text_, struct MorphicConstraints **out_);

/*
 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum MorphicStatus morphic_constraints_from_file(const char *path,
                                                 struct MorphicConstraints **out_);

/*
 # Safety
 `c` is null or a live handle.
 */
void morphic_constraints_free(struct MorphicConstraints *c);

/*
 Checks `w` against `c`. `good` is set when `w` satisfies every
 constraint; otherwise `violation` holds the earliest violation.

 # Safety
 Both handles are live; the out pointers are writable.
 */
enum MorphicStatus morphic_check(const struct MorphicWord *w,
                                 const struct MorphicConstraints *c,
                                 bool *good,
                                 struct MorphicViolation *violation);

/*
 Depth-first search for a good word of length `max_length`. `witness` may be
 null; otherwise it receives a longest good word found (or null if the
 language is empty).

 # Safety
 `c` is a live handle; `result` is writable; `witness` is null or writable.
 */
enum MorphicStatus morphic_longest_word_search(const struct MorphicConstraints *c,
                                               size_t max_length,
                                               uint64_t node_budget,
                                               struct MorphicSearchResult *result,
                                               struct MorphicWord **witness);

/*
 Words of length `length` that extend by `horizon` letters on both sides,
 one per line in ascending order.

 # Safety
 `c` is a live handle; `out` is writable.
 */
enum MorphicStatus morphic_extendable_set(const struct MorphicConstraints *c,
                                          size_t length,
                                          size_t horizon,
                                          char **out_);

/*
 Writes the number of good words of each length `1..=n_max` into
 `counts[0..n_max]`.

 # Safety
 `c` is a live handle; `counts` has room for `n_max` values.
 */
enum MorphicStatus morphic_count_by_length(const struct MorphicConstraints *c,
                                           size_t n_max,
                                           uint64_t *counts);

/*
 Runs a theorem manifest. `passed` receives the verdict; `report`, if not
 null, receives the rendered report.

 # Safety
 `path` is a NUL-terminated string; `passed` is writable; `report` is null
 or writable.
 */
enum MorphicStatus morphic_verify_manifest(const char *path, bool *passed, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORPHIC_H */
