#ifndef DIPOLE_MEMORY_H
#define DIPOLE_MEMORY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DmBesselOrder {
  DM_BESSEL_ORDER_ZERO = 0,
  DM_BESSEL_ORDER_ONE = 1,
} DmBesselOrder;

typedef enum DmModel {
  DM_MODEL_FULL = 0,
  DM_MODEL_ADIABATIC = 1,
} DmModel;

/**
 * Result code of every fallible call.
 */
typedef enum DmStatus {
  DM_STATUS_OK = 0,
  DM_STATUS_NULL_POINTER = 1,
  DM_STATUS_PARAMETER = 2,
  DM_STATUS_STABILITY = 3,
  DM_STATUS_SINGULAR_TRANSFORM = 4,
  DM_STATUS_UNSUPPORTED = 5,
  DM_STATUS_CONVERGENCE = 6,
  DM_STATUS_RESOLUTION = 7,
  DM_STATUS_CONFIG = 8,
  DM_STATUS_IO = 9,
  DM_STATUS_PANIC = 10,
} DmStatus;

/**
 * Complex field sampled on a uniform time grid.
 */
typedef struct DmEnvelope DmEnvelope;

/**
 * Coupling or detuning schedule.
 */
typedef struct DmSchedule DmSchedule;

/**
 * Outcome of a cavity simulation.
 */
typedef struct DmSimResult DmSimResult;

/**
 * Efficiencies of a run; undefined entries are NaN.
 */
typedef struct DmEfficiencies {
  double eta_w;
  double eta_r;
  double eta_tot;
  double leakage;
  double decay_loss;
} DmEfficiencies;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `capacity`). Returns the full length including the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `capacity` bytes.
 */
size_t dm_last_error_message(char *buf, size_t capacity);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dm_version(void);

/**
 * Square coupling `amplitude` (rad/s) on `[start, end]`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum DmStatus dm_schedule_square(double start,
                                 double end,
                                 double amplitude,
                                 struct DmSchedule **out);

/**
 * Gaussian coupling `amplitude exp(-(t - center)^2 / (2 width^2))` on `[start, end]`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum DmStatus dm_schedule_gaussian(double start,
                                   double end,
                                   double amplitude,
                                   double center,
                                   double width,
                                   struct DmSchedule **out);

/**
 * Monotone-cubic table through `n` points. `signed` selects a detuning
 * (any sign) instead of a coupling (non-negative).
 *
 * # Safety
 * `times` and `values` must be valid for `n` reads; `out` for one write.
 */
enum DmStatus dm_schedule_tabulated(const double *times,
                                    const double *values,
                                    size_t n,
                                    bool signed_,
                                    struct DmSchedule **out);

/**
 * Union of two schedules with disjoint supports.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` valid for one write.
 */
enum DmStatus dm_schedule_merge(const struct DmSchedule *a,
                                const struct DmSchedule *b,
                                struct DmSchedule **out);

/**
 * Value at `t`; NaN for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
double dm_schedule_value(const struct DmSchedule *s, double t);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void dm_schedule_free(struct DmSchedule *s);

/**
 * Unit-norm Gaussian on the grid `t0 + k dt`, `k < n`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum DmStatus dm_envelope_gaussian(double t0,
                                   double dt,
                                   size_t n,
                                   double center,
                                   double width,
                                   struct DmEnvelope **out);

/**
 * Envelope from `n` samples given as separate real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must be valid for `n` reads; `out` for one write.
 */
enum DmStatus dm_envelope_from_samples(double t0,
                                       double dt,
                                       size_t n,
                                       const double *re,
                                       const double *im,
                                       struct DmEnvelope **out);

/**
 * Normalized optimal write input for coupling `g`.
 *
 * # Safety
 * `g` must be a live handle; `out` valid for one write.
 */
enum DmStatus dm_optimal_write_input(const struct DmSchedule *g,
                                     double kappa,
                                     double gamma,
                                     double t0,
                                     double dt,
                                     size_t n,
                                     struct DmEnvelope **out);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
size_t dm_envelope_len(const struct DmEnvelope *e);

/**
 * Photon number `int |E|^2 dt`; NaN for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
double dm_envelope_norm(const struct DmEnvelope *e);

/**
 * Copy the samples into caller buffers of capacity `n`.
 *
 * # Safety
 * `re` and `im` must be valid for `n` writes.
 */
enum DmStatus dm_envelope_copy(const struct DmEnvelope *e, double *re, double *im, size_t n);

/**
 * # Safety
 * `e` must be null or a handle not yet freed.
 */
void dm_envelope_free(struct DmEnvelope *e);

/**
 * Simulate the cavity on the input's grid. `delta` may be null for no
 * detuning; `sigma0` is the initial polarization.
 *
 * # Safety
 * Handles must be live or, for `delta`, null; `out` valid for one write.
 */
enum DmStatus dm_simulate(enum DmModel model,
                          const struct DmEnvelope *input,
                          const struct DmSchedule *g,
                          const struct DmSchedule *delta,
                          double kappa,
                          double gamma,
                          double sigma0_re,
                          double sigma0_im,
                          struct DmSimResult **out);

/**
 * # Safety
 * `r` must be a live handle and `out` valid for one write.
 */
enum DmStatus dm_result_efficiencies(const struct DmSimResult *r, struct DmEfficiencies *out);

/**
 * Continuity residual of the run; NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double dm_result_continuity_residual(const struct DmSimResult *r);

/**
 * Number of time samples; 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t dm_result_len(const struct DmSimResult *r);

/**
 * Copy the output field into caller buffers of capacity `n`.
 *
 * # Safety
 * `re` and `im` must be valid for `n` writes.
 */
enum DmStatus dm_result_output(const struct DmSimResult *r, double *re, double *im, size_t n);

/**
 * Copy the atomic polarization into caller buffers of capacity `n`.
 *
 * # Safety
 * `re` and `im` must be valid for `n` writes.
 */
enum DmStatus dm_result_polarization(const struct DmSimResult *r, double *re, double *im, size_t n);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void dm_result_free(struct DmSimResult *r);

/**
 * Square-pulse efficiency `r/(r+gamma) (1 - exp(-2 (r+gamma) T))`, `r = g0^2/kappa`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum DmStatus dm_square_pulse_efficiency(double g0,
                                         double kappa,
                                         double gamma,
                                         double duration,
                                         double *out);

/**
 * `(1 - exp(-2 tau_w)) (1 - exp(-2 tau_r))`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum DmStatus dm_total_efficiency(double tau_w, double tau_r, double *out);

/**
 * Entire Bessel kernel `sum_k a^k / (k! (k+n)!)` of order 0 or 1.
 */
double dm_bessel_kernel(enum DmBesselOrder order, double a);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIPOLE_MEMORY_H */
