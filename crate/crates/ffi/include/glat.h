#ifndef GLAT_H
#define GLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GlatStatus {
  GLAT_STATUS_OK = 0,
  GLAT_STATUS_NULL_POINTER = 1,
  GLAT_STATUS_INVALID_UTF8 = 2,
  GLAT_STATUS_PARSE_ERROR = 3,
  GLAT_STATUS_INVALID_PARAMETER = 4,
  GLAT_STATUS_BUFFER_TOO_SMALL = 5,
  GLAT_STATUS_OVERFLOW = 6,
  GLAT_STATUS_INTERNAL_ERROR = 7,
  GLAT_STATUS_PANIC = 8,
} GlatStatus;

typedef enum GlatFormat {
  GLAT_FORMAT_HUMAN = 0,
  GLAT_FORMAT_KV = 1,
} GlatFormat;

// Opaque lattice handle.
typedef struct GlatLattice GlatLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a lattice file (JSON) into a new handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum GlatStatus glat_lattice_from_json(const char *text, struct GlatLattice **out);

// Builds a gallery lattice: `"torus-pi"`, `"torus-w"` or `"trepalin"` (which uses `n`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum GlatStatus glat_lattice_gallery(const char *name, uint32_t n, struct GlatLattice **out);

// Releases a handle; null is ignored.
//
// # Safety
// `lattice` must come from this library and not be used afterwards.
void glat_lattice_free(struct GlatLattice *lattice);

// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_lattice_rank(const struct GlatLattice *lattice, size_t *out);

// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_lattice_group_order(const struct GlatLattice *lattice, size_t *out);

// Serializes to the lattice file format; free the result with `glat_string_free`.
//
// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_lattice_to_json(const struct GlatLattice *lattice, char **out);

// # Safety
// `s` must come from this library and not be used afterwards; null is ignored.
void glat_string_free(char *s);

// Number of subgroups; subgroup indices follow the canonical `(order, members)` order,
// so the last index is the whole group.
//
// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_lattice_subgroup_count(const struct GlatLattice *lattice, size_t *out);

// Invariant factors of H1 over subgroup `subgroup` (of the dual lattice if
// `dual_side`). `*len` receives the number of factors, 0 for a trivial group.
// Returns `BufferTooSmall` (with `*len` set) if `capacity` is too small.
//
// # Safety
// `lattice` must be a live handle, `len` a valid pointer, and `factors`
// valid for `capacity` writes (it may be null when `capacity` is 0).
enum GlatStatus glat_h1_invariant_factors(const struct GlatLattice *lattice,
                                          size_t subgroup,
                                          bool dual_side,
                                          int64_t *factors,
                                          size_t capacity,
                                          size_t *len);

// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_is_coflasque(const struct GlatLattice *lattice, bool *out);

// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_is_flasque(const struct GlatLattice *lattice, bool *out);

// Flasque resolution `0 -> M -> S -> F -> 0`; returns new handles for `S` and `F`.
//
// # Safety
// `lattice` must be a live handle; `s_out` and `f_out` valid pointers.
enum GlatStatus glat_flasque_resolution(const struct GlatLattice *lattice,
                                        struct GlatLattice **s_out,
                                        struct GlatLattice **f_out);

// Stable-permutation obstruction report. `rank_bound` 0 means rank + 8 and
// `coeff_bound` 0 means the default. Free the result with `glat_string_free`.
//
// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum GlatStatus glat_obstruction_report(const struct GlatLattice *lattice,
                                        uint32_t rank_bound,
                                        uint32_t coeff_bound,
                                        enum GlatFormat format,
                                        char **out);

// Message of the last failed call on this thread ("" after a success).
// Valid until the next call into the library on this thread.
const char *glat_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLAT_H */
