/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SEMIFLUID_H
#define SEMIFLUID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_UTF8 = 2,
  SF_STATUS_IO = 3,
  SF_STATUS_PARSE = 4,
  SF_STATUS_INVALID_ARGUMENT = 5,
  /**
   * A solution broke a packing rule.
   */
  SF_STATUS_INFEASIBLE = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

typedef enum SfFamily {
  SF_FAMILY_EASY = 0,
  SF_FAMILY_HARD = 1,
} SfFamily;

/**
 * Opaque instance handle.
 */
typedef struct SfInstance SfInstance;

/**
 * Opaque solution handle.
 */
typedef struct SfSolution SfSolution;

/**
 * Search limits. Zero (or a negative discrepancy) means unlimited.
 */
typedef struct SfLimits {
  /**
   * Seconds of wall time.
   */
  double time_limit;
  uint64_t max_queue;
  int64_t max_discrepancy;
  uint64_t max_nodes;
  bool symmetry;
  /**
   * Skip nodes whose packing state was already expanded.
   */
  bool prune_duplicates;
  /**
   * Bound each item by the holders it fits instead of all free volume.
   */
  bool fit_bound;
} SfLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *sf_last_error(void);

/**
 * Static name of a status code.
 */
const char *sf_status_name(enum SfStatus status);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sf_string_free(char *s);

/**
 * Reads an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_instance_read(const char *path, struct SfInstance **out);

/**
 * Parses instance text in the file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_instance_parse(const char *text, struct SfInstance **out);

/**
 * # Safety
 * `instance` must come from this library and not have been freed. Null is ignored.
 */
void sf_instance_free(struct SfInstance *instance);

/**
 * Number of items, or 0 for null.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t sf_instance_item_count(const struct SfInstance *instance);

/**
 * Instance text in the file format.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_instance_to_string(const struct SfInstance *instance, char **out);

/**
 * Generates an instance. `factor` is a fraction such as "3/2" and may be null
 * for 1; it only affects hard instances. For easy instances the known full
 * packing is stored in `layout` when that pointer is not null.
 *
 * # Safety
 * `factor` must be null or a NUL-terminated string; `out` must be valid;
 * `layout` may be null.
 */
enum SfStatus sf_generate(enum SfFamily family,
                          size_t n_items,
                          uint32_t length_digits,
                          const char *factor,
                          uint64_t seed,
                          struct SfInstance **out,
                          struct SfSolution **layout);

/**
 * Solves with a method named as on the command line ("LBF", "LDS", ...).
 * `limits` may be null for unlimited search with the symmetry rules,
 * duplicate pruning and the fit-aware bound.
 *
 * # Safety
 * `instance` must be a live handle, `method` a NUL-terminated string,
 * `limits` null or valid, and `out` a valid pointer.
 */
enum SfStatus sf_solve(const struct SfInstance *instance,
                       const char *method,
                       const struct SfLimits *limits,
                       struct SfSolution **out);

/**
 * Reads a solution file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_solution_read(const char *path, struct SfSolution **out);

/**
 * # Safety
 * `solution` must come from this library and not have been freed. Null is ignored.
 */
void sf_solution_free(struct SfSolution *solution);

/**
 * Writes a solution file.
 *
 * # Safety
 * `solution` must be a live handle and `path` a NUL-terminated string.
 */
enum SfStatus sf_solution_write(const struct SfSolution *solution, const char *path);

/**
 * Solution text in the file format.
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_solution_to_string(const struct SfSolution *solution, char **out);

/**
 * Exact objective as a fraction such as "1321/500".
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_solution_objective(const struct SfSolution *solution, char **out);

/**
 * Nearest double to the objective, or NaN for null.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
double sf_solution_objective_f64(const struct SfSolution *solution);

/**
 * True if a tree search proved the solution optimal.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
bool sf_solution_is_optimal(const struct SfSolution *solution);

/**
 * Nodes expanded by the search that produced the solution; 0 for heuristics.
 *
 * # Safety
 * `solution` must be null or a live handle.
 */
uint64_t sf_solution_nodes_explored(const struct SfSolution *solution);

/**
 * # Safety
 * `solution` must be null or a live handle.
 */
size_t sf_solution_placement_count(const struct SfSolution *solution);

/**
 * Checks a solution. An infeasible one gives the `Infeasible` status, with the
 * violations in the last error.
 *
 * # Safety
 * Both handles must be live.
 */
enum SfStatus sf_validate(const struct SfInstance *instance, const struct SfSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMIFLUID_H */
