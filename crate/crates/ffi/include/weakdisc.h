#ifndef WEAKDISC_H
#define WEAKDISC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum WdFormat {
  WD_FORMAT_CSV = 0,
  WD_FORMAT_JSONL = 1,
} WdFormat;

typedef enum WdSampling {
  WD_SAMPLING_UNIFORM_ANGLE = 0,
  WD_SAMPLING_GAUSSIAN = 1,
} WdSampling;

typedef enum WdStatus {
  WD_STATUS_OK = 0,
  WD_STATUS_NULL_POINTER = 1,
  WD_STATUS_INVALID_ARGUMENT = 2,
  WD_STATUS_REGIME = 3,
  WD_STATUS_DEGENERATE = 4,
  WD_STATUS_NO_DISCRIMINATION = 5,
  WD_STATUS_CONFIG = 6,
  WD_STATUS_IO = 7,
  WD_STATUS_INVARIANT = 8,
  WD_STATUS_MISSING_VALUE = 9,
  WD_STATUS_PANIC = 10,
} WdStatus;

/*
 A parsed experiment configuration.
 */
typedef struct WdConfig WdConfig;

/*
 A validated three-element POVM.
 */
typedef struct WdPovm WdPovm;

/*
 Sweep output, one row per sweep point.
 */
typedef struct WdRows WdRows;

/*
 Monte Carlo averages of the success-to-error ratios.
 */
typedef struct WdMcSummary {
  double mean_beta_a;
  double mean_beta_b;
  double std_error_a;
  double std_error_b;
  double mean_trace_beta_a;
  double mean_trace_beta_b;
  double std_error_trace_a;
  double std_error_trace_b;
  uint64_t sample_count;
  uint64_t seed;
} WdMcSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the calling thread's last error message into `buf` (NUL
 terminated, truncated to `len`) and returns the full message length
 excluding the NUL. `buf` may be null to query the length.

 # Safety
 `buf` must be null or point to at least `len` writable bytes.
 */
size_t wd_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *wd_version(void);

/*
 IDP limit `1 − 1/√(1+2|η|²)`.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_idp_limit_eta(double eta_re, double eta_im, double *out);

/*
 Exact overall success probability of the weak-measurement protocol.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_overall_success_exact(double eta_re, double eta_im, double g, double *out);

/*
 Weak-coupling approximation `|η|²cos²g`; `Regime` outside `|η| ≤ g/10, g ≤ 0.3`.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_overall_success_approx(double eta_re, double eta_im, double g, double *out);

/*
 Postselection probabilities: `lambda1` for the `ψ₂` branch, `lambda2 = sin²g` for `ψ₁`.

 # Safety
 Both pointers must be null or valid for writes.
 */
enum WdStatus wd_postselection_probs(double eta_re,
                                     double eta_im,
                                     double g,
                                     double *lambda1,
                                     double *lambda2);

/*
 `|⟨φ′₁|φ′₂⟩|` of the closed-form pointer states.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_pointer_overlap(double eta_re, double eta_im, double g, double *out);

/*
 Exact postselected pointer Bloch vector and success probability for
 source `k_a`, pointer `k_b`, postselection direction `f`, coupling axis
 `n` (each three doubles) and strength `g`.

 # Safety
 Input pointers must reference three readable doubles, `out_bloch` three
 writable doubles, `out_prob` one.
 */
enum WdStatus wd_exact_pointer_bloch(const double *k_a,
                                     const double *k_b,
                                     const double *f,
                                     const double *n,
                                     double g,
                                     double *out_bloch,
                                     double *out_prob);

/*
 Conventional POVM for the source pair with in-plane deviation `(dx, dy)`.

 # Safety
 `out` must be null or valid for writes; free the handle with [`wd_povm_free`].
 */
enum WdStatus wd_povm_conventional(double eps, double dx, double dy, struct WdPovm **out);

/*
 Weak-measurement POVM for the pointer pair with in-plane deviation `(dx, dy)`.

 # Safety
 `out` must be null or valid for writes; free the handle with [`wd_povm_free`].
 */
enum WdStatus wd_povm_weak(double eps, double g, double dx, double dy, struct WdPovm **out);

/*
 Element `index` (0 = π₁, 1 = π₂, 2 = π_?) as 8 doubles: row-major
 `re, im` pairs.

 # Safety
 `povm` must be a live handle, `out` must point to 8 writable doubles.
 */
enum WdStatus wd_povm_element(const struct WdPovm *povm, uint32_t index, double *out);

/*
 Smallest eigenvalue of π_?; negative values mean the set is not a
 physical POVM.

 # Safety
 `povm` must be a live handle, `out` null or valid for writes.
 */
enum WdStatus wd_povm_min_inconclusive_eigenvalue(const struct WdPovm *povm, double *out);

/*
 # Safety
 `povm` must be null or a handle not yet freed.
 */
void wd_povm_free(struct WdPovm *povm);

/*
 Closed-form `β_A`; `+INFINITY` when `δ_f = 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_beta_a(double eps, double dx, double dy, double *out);

/*
 Closed-form `β_B`; `+INFINITY` when `δ_f = 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_beta_b(double eps, double g, double dx, double dy, double *out);

/*
 Monte Carlo averages of `β_A`, `β_B`; bit-reproducible for a given seed.

 # Safety
 `out` must be null or valid for writes.
 */
enum WdStatus wd_mc_average_beta(double eps,
                                 double g,
                                 double delta_f_mag,
                                 uint64_t samples,
                                 uint64_t seed,
                                 enum WdSampling sampling,
                                 struct WdMcSummary *out);

/*
 Parses a JSON experiment configuration.

 # Safety
 `json` must be a NUL-terminated string; free the handle with [`wd_config_free`].
 */
enum WdStatus wd_config_from_json(const char *json, struct WdConfig **out);

/*
 # Safety
 `config` must be a live handle.
 */
enum WdStatus wd_config_set_seed(struct WdConfig *config, uint64_t seed);

/*
 # Safety
 `config` must be null or a handle not yet freed.
 */
void wd_config_free(struct WdConfig *config);

/*
 Runs the configured sweep (a single row without a sweep axis).

 # Safety
 `config` must be a live handle; free the result with [`wd_rows_free`].
 */
enum WdStatus wd_run_sweep(const struct WdConfig *config, struct WdRows **out);

/*
 # Safety
 `rows` must be a live handle, `out` null or valid for writes.
 */
enum WdStatus wd_rows_len(const struct WdRows *rows, size_t *out);

/*
 Numeric value of `column` in row `row`. Skipped outputs give
 `MissingValue`; unbounded values are `+INFINITY`.

 # Safety
 `rows` must be a live handle, `column` a NUL-terminated string.
 */
enum WdStatus wd_rows_value(const struct WdRows *rows, size_t row, const char *column, double *out);

/*
 Whether row `row` has every output (otherwise it is marked skipped).

 # Safety
 `rows` must be a live handle, `out` null or valid for writes.
 */
enum WdStatus wd_rows_is_complete(const struct WdRows *rows, size_t row, bool *out);

/*
 Writes the rows with a metadata header to `path`.

 # Safety
 `rows` must be a live handle, `path` a NUL-terminated string.
 */
enum WdStatus wd_rows_write(const struct WdRows *rows, enum WdFormat format, const char *path);

/*
 # Safety
 `rows` must be null or a handle not yet freed.
 */
void wd_rows_free(struct WdRows *rows);

/*
 Runs the verification suite; `failed` receives the number of failing
 checks. Returns `Invariant` when any check fails.

 # Safety
 `failed` must be null or valid for writes.
 */
enum WdStatus wd_verify(bool quick, uint64_t seed, uint32_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKDISC_H */
