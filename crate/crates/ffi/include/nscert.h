#ifndef NSCERT_H
#define NSCERT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NscertK2Variant {
  NSCERT_K2_VARIANT_CLOSED_FORM = 0,
  NSCERT_K2_VARIANT_ASSEMBLED = 1,
  NSCERT_K2_VARIANT_CONSERVATIVE = 2,
} NscertK2Variant;

typedef enum NscertStatus {
  NSCERT_STATUS_OK = 0,
  /**
   * The computation finished and the criterion does not hold.
   */
  NSCERT_STATUS_CRITERION_FAILED = 1,
  NSCERT_STATUS_INVALID_INPUT = 2,
  NSCERT_STATUS_NUMERICAL = 3,
  NSCERT_STATUS_NULL_POINTER = 4,
  NSCERT_STATUS_IO = 5,
  NSCERT_STATUS_PANIC = 6,
} NscertStatus;

/**
 * Opaque constant bundle.
 */
typedef struct NscertBundle NscertBundle;

/**
 * Opaque spectral field.
 */
typedef struct NscertField NscertField;

/**
 * Opaque trajectory.
 */
typedef struct NscertTrajectory NscertTrajectory;

/**
 * Periodic box `[0, L]^3` with viscosity and regularity index.
 */
typedef struct NscertBox {
  double side;
  double nu;
  double alpha;
} NscertBox;

typedef struct NscertBudget {
  double nu_bar;
  double eps1;
  double eps2;
  double sigma;
  double delta;
} NscertBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread; do not free.
 */
const char *nscert_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void nscert_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *nscert_version(void);

/**
 * Zero field on `[0, side]^3` with truncation `m`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum NscertStatus nscert_field_zeros(double side, uintptr_t m, struct NscertField **out);

/**
 * Field from the JSON snapshot format.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `out` a valid pointer.
 */
enum NscertStatus nscert_field_from_json(const char *json, struct NscertField **out);

/**
 * Field from a snapshot file in either format.
 *
 * # Safety
 * `path` must be a NUL-terminated string, `out` a valid pointer.
 */
enum NscertStatus nscert_field_load(const char *path, struct NscertField **out);

/**
 * # Safety
 * `field` must come from this library and not have been freed. Null is ignored.
 */
void nscert_field_free(struct NscertField *field);

/**
 * Sets the coefficient at wave vector `k` (and its conjugate at `-k`).
 *
 * # Safety
 * `field` must be a valid handle; `re` and `im` must point to three values each.
 */
enum NscertStatus nscert_field_set_mode(struct NscertField *field,
                                        int32_t k1,
                                        int32_t k2,
                                        int32_t k3,
                                        const double *re,
                                        const double *im);

/**
 * Applies the Leray projection in place.
 *
 * # Safety
 * `field` must be a valid handle.
 */
enum NscertStatus nscert_field_leray_project(struct NscertField *field);

/**
 * `|u|_{s,L}`.
 *
 * # Safety
 * `field` must be a valid handle and `out` a valid pointer.
 */
enum NscertStatus nscert_field_hs_norm(const struct NscertField *field, double s, double *out);

/**
 * JSON snapshot of the field.
 *
 * # Safety
 * `field` must be a valid handle and `out` a valid pointer.
 */
enum NscertStatus nscert_field_to_json(const struct NscertField *field, char **out);

/**
 * Lower bound for `C_S(β)` from `budget` ascent iterations.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum NscertStatus nscert_estimate_sobolev(double beta,
                                          uintptr_t budget,
                                          uint64_t seed,
                                          double *out);

/**
 * Bundle from explicit `C_S(1-α)`, `C_S(1)`, `C_S(α-½)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum NscertStatus nscert_bundle_from_values(double alpha,
                                            double side,
                                            double eps1,
                                            double eps2,
                                            double cs_one_minus_alpha,
                                            double cs_one,
                                            double cs_alpha_minus_half,
                                            enum NscertK2Variant k2_variant,
                                            struct NscertBundle **out);

/**
 * Bundle from a constant table in its JSON form.
 *
 * # Safety
 * `table_json` must be a NUL-terminated string, `out` a valid pointer.
 */
enum NscertStatus nscert_bundle_from_table(double alpha,
                                           double side,
                                           double eps1,
                                           double eps2,
                                           const char *table_json,
                                           enum NscertK2Variant k2_variant,
                                           struct NscertBundle **out);

/**
 * # Safety
 * `bundle` must come from this library and not have been freed. Null is ignored.
 */
void nscert_bundle_free(struct NscertBundle *bundle);

/**
 * Selected `K₂`, `K₃`, `K₄`; any output may be null.
 *
 * # Safety
 * `bundle` must be a valid handle; non-null outputs must be valid pointers.
 */
enum NscertStatus nscert_bundle_constants(const struct NscertBundle *bundle,
                                          double *k2,
                                          double *k3,
                                          double *k4);

/**
 * # Safety
 * `bundle` must be a valid handle and `out` a valid pointer.
 */
enum NscertStatus nscert_bundle_to_json(const struct NscertBundle *bundle, char **out);

/**
 * Unforced Galerkin run from `u0`; `config_json` holds the solver settings
 * (`m`, `dt`, `t_end`, optional `sample_every`, `k0`, `caloric`, ...).
 *
 * # Safety
 * `u0` must be a valid handle, `config_json` a NUL-terminated string and `out` a valid pointer.
 */
enum NscertStatus nscert_integrate(const struct NscertField *u0,
                                   struct NscertBox domain,
                                   const char *config_json,
                                   struct NscertTrajectory **out);

/**
 * # Safety
 * `traj` must come from this library and not have been freed. Null is ignored.
 */
void nscert_trajectory_free(struct NscertTrajectory *traj);

/**
 * Number of diagnostic samples; `completed` receives 1 if the run reached `t_end`.
 *
 * # Safety
 * `traj` must be a valid handle; outputs must be valid pointers.
 */
enum NscertStatus nscert_trajectory_info(const struct NscertTrajectory *traj,
                                         uintptr_t *samples,
                                         int32_t *completed);

/**
 * Diagnostics as CSV text.
 *
 * # Safety
 * `traj` must be a valid handle and `out` a valid pointer.
 */
enum NscertStatus nscert_trajectory_csv(const struct NscertTrajectory *traj, char **out);

/**
 * Unforced small-data condition. Returns `NSCERT_STATUS_OK` when it holds,
 * `NSCERT_STATUS_CRITERION_FAILED` when it does not; the certificate JSON
 * is written to `report_json` in both cases.
 *
 * # Safety
 * Handles must be valid and `report_json` a valid pointer.
 */
enum NscertStatus nscert_check_smallness(const struct NscertField *u0,
                                         const struct NscertBundle *bundle,
                                         struct NscertBox domain,
                                         struct NscertBudget budget,
                                         double t_end,
                                         char **report_json);

/**
 * Unforced proximity condition for the datum `v0` against the reference run `traj`.
 *
 * # Safety
 * Handles must be valid and `report_json` a valid pointer.
 */
enum NscertStatus nscert_check_proximity(const struct NscertTrajectory *traj,
                                         const struct NscertField *v0,
                                         const struct NscertBundle *bundle,
                                         struct NscertBudget budget,
                                         double t_end,
                                         char **report_json);

/**
 * Caloric lower bound `T0` with default search options and the given `T_max`.
 *
 * # Safety
 * Handles must be valid; `t0` and `report_json` must be valid pointers.
 */
enum NscertStatus nscert_caloric_lower_bound(const struct NscertField *u0,
                                             const struct NscertBundle *bundle,
                                             struct NscertBox domain,
                                             struct NscertBudget budget,
                                             double t_max,
                                             double *t0,
                                             char **report_json);

/**
 * Runs the command-line interface with `argc` arguments (including the
 * program name) and returns its exit code.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings.
 */
int32_t nscert_cli_run(int32_t argc, const char *const *argv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSCERT_H */
