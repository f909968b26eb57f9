#ifndef NLS_BLOWUP_H
#define NLS_BLOWUP_H

/* Generated by cbindgen from src/lib.rs. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum NlsStatus {
  NLS_STATUS_OK = 0,
  NLS_STATUS_NULL_POINTER = 1,
  NLS_STATUS_INVALID_UTF8 = 2,
  NLS_STATUS_DOMAIN = 3,
  NLS_STATUS_CONSTRUCTION = 4,
  NLS_STATUS_OVERFLOW = 5,
  NLS_STATUS_DEGENERATE = 6,
  NLS_STATUS_INTERNAL = 7,
  NLS_STATUS_CONFIG = 8,
  NLS_STATUS_PANIC = 9,
} NlsStatus;

// Variants of the exponential-series constant κ.
typedef enum NlsKappaVariant {
  NLS_KAPPA_VARIANT_MAIN_PROOF = 0,
  NLS_KAPPA_VARIANT_MAIN_PROOF_OPTIMAL = 1,
  NLS_KAPPA_VARIANT_CRITICAL_FREE_VARIANT = 2,
} NlsKappaVariant;

// Why an evolution stopped.
typedef enum NlsStopReason {
  NLS_STOP_REASON_COMPLETED = 0,
  NLS_STOP_REASON_BLOWUP_INDICATED = 1,
  NLS_STOP_REASON_RESOLUTION_EXHAUSTED = 2,
  NLS_STOP_REASON_NUMERICAL_OVERFLOW = 3,
} NlsStopReason;

// Opaque sampled field on a periodic grid.
typedef struct NlsField NlsField;

// Opaque nonlinearity `N(u) = Σ c|u|^β` or the exponential series.
typedef struct NlsNonlinearity NlsNonlinearity;

// Conserved and virial quantities of a sampled field.
typedef struct NlsObservables {
  double mass;
  double kinetic;
  double energy;
  double variance;
  double variance_rate;
  double grad_norm_sq;
} NlsObservables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Owned by the
// library and valid until the next call on the same thread.
const char *nls_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void nls_string_free(char *s);

// Builds `N(s) = Σ coefficients[j]·s^exponents[j]` with strictly increasing exponents.
//
// # Safety
// `coefficients` and `exponents` must point to `len` doubles; `out` must be writable.
enum NlsStatus nls_nonlinearity_new(const double *coefficients,
                                    const double *exponents,
                                    size_t len,
                                    struct NlsNonlinearity **out_handle);

// Builds the exponential series `N(s) = e^s` truncated at `truncation_order` terms.
//
// # Safety
// `out_handle` must be writable.
enum NlsStatus nls_nonlinearity_exponential(size_t truncation_order,
                                            struct NlsNonlinearity **out_handle);

// # Safety
// `nl` must come from this library and not have been freed. NULL is ignored.
void nls_nonlinearity_free(struct NlsNonlinearity *nl);

// Wraps `num_points` samples on `[-half_width, half_width)`.
//
// # Safety
// `re` and `im` must point to `num_points` doubles; `out_handle` must be writable.
enum NlsStatus nls_field_new(double half_width,
                             size_t num_points,
                             const double *re,
                             const double *im,
                             struct NlsField **out_handle);

// Samples `a·e^{-x²/2}·e^{i(θ + b/4)x²}`. Zero `half_width`/`num_points`
// select the family's recommended grid.
//
// # Safety
// `out_handle` must be writable.
enum NlsStatus nls_field_chirped_gaussian(double theta,
                                          double a,
                                          double b,
                                          double half_width,
                                          size_t num_points,
                                          struct NlsField **out_handle);

// # Safety
// `field` must come from this library and not have been freed. NULL is ignored.
void nls_field_free(struct NlsField *field);

// Number of grid points of `field`.
//
// # Safety
// `field` must be a live handle; `out_len` must be writable.
enum NlsStatus nls_field_len(const struct NlsField *field, size_t *out_len);

// Copies the samples into `re` and `im`, which must hold `len` doubles.
//
// # Safety
// `field` must be a live handle; `re` and `im` must be writable for `len` doubles.
enum NlsStatus nls_field_samples(const struct NlsField *field, double *re, double *im, size_t len);

// Sharp constant `C*(p)` of the one-dimensional Gagliardo–Nirenberg inequality.
//
// # Safety
// `out_value` must be writable.
enum NlsStatus nls_sharp_cstar(double p, double *out_value);

// Sharp `C(δ)` with `a^p ≤ C a² + δ a^q` for all `a ≥ 0`.
//
// # Safety
// `out_value` must be writable.
enum NlsStatus nls_interp_constant(double p, double q, double delta, double *out_value);

// Threshold κ of the exponential-series criterion `E + κM < 0`.
//
// # Safety
// `out_value` must be writable.
enum NlsStatus nls_exponential_kappa(enum NlsKappaVariant variant, double *out_value);

// # Safety
// `field` and `nl` must be live handles; `out_obs` must be writable.
enum NlsStatus nls_observables(const struct NlsField *field,
                               const struct NlsNonlinearity *nl,
                               struct NlsObservables *out_obs);

// Evaluates the criteria matching the structure of `nl` and writes a JSON
// array of reports to `*out_json`, to be released with [`nls_string_free`].
// `criterion` selects a single criterion by name; NULL selects automatically.
//
// # Safety
// `field` and `nl` must be live handles; `criterion` is NULL or a
// NUL-terminated string; `out_json` must be writable.
enum NlsStatus nls_criteria_report_json(const struct NlsField *field,
                                        const struct NlsNonlinearity *nl,
                                        const char *criterion,
                                        char **out_json);

// Evolves `field` in place to `t_end` with step `dt`, stopping early on a
// blow-up or resolution indicator. Writes the stop reason and final time.
//
// # Safety
// `field` and `nl` must be live handles; the out-pointers must be writable.
enum NlsStatus nls_evolve(struct NlsField *field,
                          const struct NlsNonlinearity *nl,
                          double dt,
                          double t_end,
                          enum NlsStopReason *out_reason,
                          double *out_time);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLS_BLOWUP_H */
