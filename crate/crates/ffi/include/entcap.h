#ifndef ENTCAP_H
#define ENTCAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntcapStatus {
  ENTCAP_STATUS_OK = 0,
  ENTCAP_STATUS_NULL_POINTER = 1,
  ENTCAP_STATUS_INVALID_UTF8 = 2,
  ENTCAP_STATUS_INVALID_INPUT = 3,
  ENTCAP_STATUS_DIMENSION_MISMATCH = 4,
  ENTCAP_STATUS_INVALID_BOUND = 5,
  ENTCAP_STATUS_NUMERICAL = 6,
  ENTCAP_STATUS_IO = 7,
  ENTCAP_STATUS_PANIC = 8,
} EntcapStatus;

// Criterion bound to a split.
typedef struct EntcapCriterion EntcapCriterion;

// Bipartite density matrix.
typedef struct EntcapDensityMatrix EntcapDensityMatrix;

// Capability estimate.
typedef struct EntcapEstimate EntcapEstimate;

typedef struct EntcapDetection {
  bool detected;
  // Positive means the separability inequality is violated.
  double statistic;
  double threshold;
} EntcapDetection;

typedef struct EntcapEstimateSummary {
  uint64_t n_samples;
  uint64_t n_detected;
  double p_hat;
  double ci_low;
  double ci_high;
  uint64_t master_seed;
  double wall_time_s;
} EntcapEstimateSummary;

typedef struct EntcapBound {
  double value;
  double exponent_rate;
  double prefactor_log;
  bool vacuous;
} EntcapBound;

typedef struct EntcapWitnessCheck {
  double alpha;
  double trace;
  double inner_ball_value;
  // `false` proves the operator is not a witness.
  bool passes_inner_ball;
} EntcapWitnessCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *entcap_last_error(void);

// Static, NUL-terminated version string.
const char *entcap_version(void);

// Builds a density matrix from row-major parts of a `(da*db)²` matrix.
// `im` may be null for a real matrix.
//
// # Safety
// `re` (and `im` if non-null) must point to `(da*db)²` doubles; `out` must
// be writable.
enum EntcapStatus entcap_density_matrix_new(size_t dim_a,
                                            size_t dim_b,
                                            const double *re,
                                            const double *im,
                                            struct EntcapDensityMatrix **out);

// Draws a state from the `k`-induced measure.
//
// # Safety
// `out` must be writable.
enum EntcapStatus entcap_induced_state(size_t dim_a,
                                       size_t dim_b,
                                       size_t k,
                                       uint64_t master_seed,
                                       uint64_t stream_index,
                                       struct EntcapDensityMatrix **out);

// # Safety
// `rho` must be null or a handle from this library not yet freed.
void entcap_density_matrix_free(struct EntcapDensityMatrix *rho);

// Total dimension `da*db`, or 0 for a null handle.
//
// # Safety
// `rho` must be null or a live handle.
size_t entcap_density_matrix_dim(const struct EntcapDensityMatrix *rho);

// Copies the entries into row-major `re` / `im` arrays of `dim²` doubles.
//
// # Safety
// `rho` must be a live handle; `re` and `im` must be writable for `dim²`
// doubles.
enum EntcapStatus entcap_density_matrix_entries(const struct EntcapDensityMatrix *rho,
                                                double *re,
                                                double *im);

// `tr(ρ²)`.
//
// # Safety
// `rho` must be a live handle; `out` must be writable.
enum EntcapStatus entcap_density_matrix_purity(const struct EntcapDensityMatrix *rho, double *out);

// Parses a criterion descriptor such as `"ew_ppt"` or `"fisher(pairs=5)"`
// for a `dim_a x dim_b` split.
//
// # Safety
// `descriptor` must be a NUL-terminated string; `out` must be writable.
enum EntcapStatus entcap_criterion_new(const char *descriptor,
                                       size_t dim_a,
                                       size_t dim_b,
                                       struct EntcapCriterion **out);

// # Safety
// `criterion` must be null or a handle from this library not yet freed.
void entcap_criterion_free(struct EntcapCriterion *criterion);

// Evaluates a criterion on one state. The seed is used only by criteria
// that draw a witness or observables per state.
//
// # Safety
// Handles must be live; `out` must be writable.
enum EntcapStatus entcap_detect(const struct EntcapCriterion *criterion,
                                const struct EntcapDensityMatrix *rho,
                                uint64_t master_seed,
                                uint64_t stream_index,
                                struct EntcapDetection *out);

// Monte Carlo capability estimate. `workers = 0` reads `ENTCAP_WORKERS`
// (default: all cores). Counts do not depend on the worker count.
//
// # Safety
// `criterion` must be a live handle; `out` must be writable.
enum EntcapStatus entcap_estimate(const struct EntcapCriterion *criterion,
                                  size_t k,
                                  uint64_t n_samples,
                                  uint64_t master_seed,
                                  double ci_level,
                                  size_t workers,
                                  struct EntcapEstimate **out);

// # Safety
// `est` must be null or a handle from this library not yet freed.
void entcap_estimate_free(struct EntcapEstimate *est);

// # Safety
// `est` must be a live handle; `out` must be writable.
enum EntcapStatus entcap_estimate_summary(const struct EntcapEstimate *est,
                                          struct EntcapEstimateSummary *out);

// Evaluates a bound selector such as `"ew alpha=1"` or
// `"faithful d=9"` at `k`. `default_d` fills in a missing dimension.
//
// # Safety
// `selector` must be a NUL-terminated string; `out` must be writable.
enum EntcapStatus entcap_bound(const char *selector,
                               size_t default_d,
                               size_t k,
                               struct EntcapBound *out);

// Necessary-condition check for a candidate witness given as a Hermitian
// `dim x dim` matrix in row-major parts. `im` may be null.
//
// # Safety
// `re` (and `im` if non-null) must point to `dim²` doubles; `out` must be
// writable.
enum EntcapStatus entcap_check_witness(const double *re,
                                       const double *im,
                                       size_t dim,
                                       struct EntcapWitnessCheck *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTCAP_H */
