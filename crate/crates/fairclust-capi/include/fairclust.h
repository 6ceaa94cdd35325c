#ifndef FAIRCLUST_H
#define FAIRCLUST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum FcStatus {
  FcOk = 0,
  /**
   * Bad argument or malformed input data.
   */
  FcErrInput = 1,
  /**
   * Internal precondition violated.
   */
  FcErrContract = 2,
  /**
   * Fairness bounds admit no assignment.
   */
  FcErrInfeasible = 3,
  /**
   * LP / flow solver failure.
   */
  FcErrSolver = 4,
  /**
   * Exact oracle refused (instance too large).
   */
  FcErrRefused = 5,
  /**
   * Filesystem / serialization problem.
   */
  FcErrIo = 6,
  /**
   * Null pointer or invalid UTF-8 argument.
   */
  FcErrNull = 7,
  /**
   * Panic caught at the boundary.
   */
  FcErrPanic = 8,
} FcStatus;

/**
 * Opaque dataset handle.
 */
typedef struct FcDataset FcDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. Borrowed pointer:
 * valid until the next failing call on the same thread; do not free.
 */
const char *fc_last_error(void);

/**
 * Load a dataset from a schema JSON file and a CSV file. On success writes
 * a handle to `out`; free it with fc_dataset_free.
 *
 * # Safety
 * `schema_path` and `csv_path` must be valid NUL-terminated strings and
 * `out` a valid pointer.
 */
enum FcStatus fc_dataset_load(const char *schema_path,
                              const char *csv_path,
                              struct FcDataset **out);

/**
 * Deterministic bank-marketing-like synthetic dataset (two colors).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FcStatus fc_dataset_synth_bank(uintptr_t n, uint64_t seed, struct FcDataset **out);

/**
 * Number of points in the dataset; 0 for a null handle.
 *
 * # Safety
 * `ds` must be a handle from this library or null.
 */
uintptr_t fc_dataset_len(const struct FcDataset *ds);

/**
 * # Safety
 * `ds` must be a handle from this library (or null, a no-op); it must not
 * be used afterwards.
 */
void fc_dataset_free(struct FcDataset *ds);

/**
 * Run the two-step fair pipeline (color-blind centers, fair LP, rounding)
 * on a dataset. `objective`: 0 = k-center, 1 = k-median, 2 = k-means.
 * `p_acc` < 0 means "leave labels alone"; otherwise the two-color labels
 * are perturbed to that accuracy first. Bounds come from the dataset
 * proportions at the given `delta`. On success `out_json` receives a JSON
 * object with costs, violation, and the assignment; free with
 * fc_string_free.
 *
 * # Safety
 * `ds` must be a live handle and `out_json` a valid pointer.
 */
enum FcStatus fc_run_pipeline(const struct FcDataset *ds,
                              uint32_t objective,
                              uintptr_t k,
                              double delta,
                              double p_acc,
                              uint64_t seed,
                              char **out_json);

/**
 * Run a full experiment sweep from an ExperimentConfig JSON string (same
 * format as the CLI's --config file). `out_json` receives the report rows
 * as a JSON array; free with fc_string_free.
 *
 * # Safety
 * `config_json` must be a valid NUL-terminated string and `out_json` a
 * valid pointer.
 */
enum FcStatus fc_run_experiment_json(const char *config_json, char **out_json);

/**
 * Free a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void fc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRCLUST_H */
