#ifndef AMD_H
#define AMD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AmdStatus {
  AMD_STATUS_OK = 0,
  AMD_STATUS_NULL_POINTER = 1,
  AMD_STATUS_INVALID_INPUT = 2,
  AMD_STATUS_NOT_REFLEXIVE = 3,
  AMD_STATUS_INTERNAL = 4,
  AMD_STATUS_PANIC = 5,
} AmdStatus;

/**
 * Opaque polytope handle.
 */
typedef struct AmdPolytope AmdPolytope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a polytope from `n` vertices given as `3 * n` coordinates
 * `x0 y0 z0 x1 ...`. The handle must be released with
 * [`amd_polytope_free`].
 *
 * # Safety
 * `coords` must point to `3 * n` readable values and `out` must be valid
 * for writing.
 */
enum AmdStatus amd_polytope_new(const int64_t *coords, size_t n, struct AmdPolytope **out);

/**
 * # Safety
 * `p` must come from [`amd_polytope_new`] and not be used afterwards.
 */
void amd_polytope_free(struct AmdPolytope *p);

/**
 * # Safety
 * `p` must be a live handle and `out` valid for writing.
 */
enum AmdStatus amd_polytope_is_reflexive(const struct AmdPolytope *p, bool *out);

/**
 * Number of amd, stopping at `limit` (0 for no limit); with `dedup`,
 * amd differing by a relabeling of summands count once.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writing.
 */
enum AmdStatus amd_polytope_count_amd(const struct AmdPolytope *p,
                                      uint64_t limit,
                                      bool dedup,
                                      uint64_t *out);

/**
 * JSON array with the smoothing invariants of each amd (at most `limit`,
 * 0 for all). Release the string with [`amd_string_free`].
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writing.
 */
enum AmdStatus amd_polytope_invariants_json(const struct AmdPolytope *p,
                                            uint64_t limit,
                                            char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void amd_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *amd_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AMD_H */
