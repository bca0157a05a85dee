#ifndef HEAPABLE_H
#define HEAPABLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HpStatus {
  /**
   * Success or a true verdict.
   */
  HP_STATUS_OK = 0,
  /**
   * A false verdict.
   */
  HP_STATUS_FALSE = 1,
  HP_STATUS_NULL_ARGUMENT = 2,
  HP_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A search ran out of budget.
   */
  HP_STATUS_EXHAUSTED = 4,
  HP_STATUS_PANIC = 5,
} HpStatus;

/**
 * A heap over a sequence of integers.
 */
typedef struct HpTree HpTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hp_version(void);

/**
 * Static description of a status code.
 */
const char *hp_status_message(enum HpStatus status);

/**
 * Decides heapability. Returns `HP_STATUS_OK` if heapable and
 * `HP_STATUS_FALSE` otherwise, writing the index of the first element that
 * found no slot to `out_fail_index` when it is not null.
 *
 * # Safety
 * `values` must point to `len` readable integers (or be null with `len` 0).
 */
enum HpStatus hp_decide(const int64_t *values, size_t len, size_t *out_fail_index);

/**
 * Builds the greedy heap. On `HP_STATUS_OK` stores a new handle in
 * `*out_tree`; otherwise stores null.
 *
 * # Safety
 * `values` must point to `len` readable integers (or be null with `len` 0);
 * `out_tree` must be writable.
 */
enum HpStatus hp_tree_greedy(const int64_t *values, size_t len, struct HpTree **out_tree);

/**
 * Builds a tree from parent links: node `i` holds `values[seq_index[i]]`
 * and has parent node `parent[i]`, `-1` for the root. A child listed before
 * its sibling is the left child.
 *
 * # Safety
 * `values` must point to `len` integers, `seq_index` and `parent` to
 * `count` entries each (nulls allowed for zero lengths); `out_tree` must be
 * writable.
 */
enum HpStatus hp_tree_from_links(const int64_t *values,
                                 size_t len,
                                 const size_t *seq_index,
                                 const ptrdiff_t *parent,
                                 size_t count,
                                 struct HpTree **out_tree);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `tree` must be null or a handle from this library not yet freed.
 */
void hp_tree_free(struct HpTree *tree);

/**
 * Number of nodes; 0 for null.
 *
 * # Safety
 * `tree` must be null or a live handle.
 */
size_t hp_tree_len(const struct HpTree *tree);

/**
 * Number of levels; 0 for null or an empty tree.
 *
 * # Safety
 * `tree` must be null or a live handle.
 */
size_t hp_tree_height(const struct HpTree *tree);

/**
 * Copies the parent links of every node into the two arrays, which must
 * hold at least `hp_tree_len(tree)` entries each.
 *
 * # Safety
 * `tree` must be a live handle and both arrays writable for `cap` entries.
 */
enum HpStatus hp_tree_parent_links(const struct HpTree *tree,
                                   size_t *out_seq_index,
                                   ptrdiff_t *out_parent,
                                   size_t cap);

/**
 * Checks that `tree` is a heap witness for `values`, and complete when
 * `require_complete` is set. `HP_STATUS_OK` if so, `HP_STATUS_FALSE` if not.
 *
 * # Safety
 * `tree` must be a live handle; `values` must point to `len` integers.
 */
enum HpStatus hp_tree_verify(const struct HpTree *tree,
                             const int64_t *values,
                             size_t len,
                             bool require_complete);

/**
 * Complete heapability of a 0/1 sequence.
 *
 * # Safety
 * `bits` must point to `len` bytes, each 0 or 1.
 */
enum HpStatus hp_complete01(const uint8_t *bits, size_t len);

/**
 * Exact fraction of heapable permutations of `1..=n`, for `n` up to 10.
 *
 * # Safety
 * Both outputs must be writable.
 */
enum HpStatus hp_exact_heapable_prob(size_t n, uint64_t *out_num, uint64_t *out_den);

/**
 * Length of a longest heapable subsequence, searched exhaustively with at
 * most `budget` node expansions.
 *
 * # Safety
 * `values` must point to `len` integers; `out_len` must be writable.
 */
enum HpStatus hp_exact_lhs(const int64_t *values, size_t len, uint64_t budget, size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEAPABLE_H */
