#ifndef LOEWNER_H
#define LOEWNER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LoewnerFractal {
  LOEWNER_FRACTAL_KOCH = 0,
  LOEWNER_FRACTAL_HILBERT = 1,
  LOEWNER_FRACTAL_ARROWHEAD = 2,
  LOEWNER_FRACTAL_HALF_SIERPINSKI = 3,
} LoewnerFractal;

typedef enum LoewnerStatus {
  LOEWNER_STATUS_OK = 0,
  LOEWNER_STATUS_NULL_POINTER = 1,
  LOEWNER_STATUS_INVALID_ARGUMENT = 2,
  // The solver failed: non-finite values, step underflow, a curve that touches back.
  LOEWNER_STATUS_NUMERICAL = 3,
  // A requested point could not be visited.
  LOEWNER_STATUS_NOT_VISITED = 4,
  // A caller buffer is shorter than the handle's length.
  LOEWNER_STATUS_BUFFER_TOO_SMALL = 5,
  LOEWNER_STATUS_PANIC = 6,
} LoewnerStatus;

// Polyline in the closed upper half-plane, with capacity times when known.
typedef struct LoewnerCurve LoewnerCurve;

// Sampled driving function on `[0, T]`.
typedef struct LoewnerDriver LoewnerDriver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; valid until the next failing call.
const char *loewner_last_error(void);

// Driver through the samples `(times[k], values[k])`, linearly interpolated.
//
// # Safety
// `times` and `values` must point to `n` readable doubles; `out` must be writable.
enum LoewnerStatus loewner_driver_new(const double *times,
                                      const double *values,
                                      uintptr_t n,
                                      struct LoewnerDriver **out);

// # Safety
// `driver` must come from this library and not be used afterwards. Null is ignored.
void loewner_driver_free(struct LoewnerDriver *driver);

// Number of samples, or 0 for a null handle.
//
// # Safety
// `driver` must be null or a live handle.
uintptr_t loewner_driver_len(const struct LoewnerDriver *driver);

// Copies the samples into caller buffers of capacity `cap`; either buffer may be null.
//
// # Safety
// Non-null buffers must hold `cap` writable doubles.
enum LoewnerStatus loewner_driver_samples(const struct LoewnerDriver *driver,
                                          double *times,
                                          double *values,
                                          uintptr_t cap);

// Value of the driver at `t`.
//
// # Safety
// `driver` must be a live handle and `out` writable.
enum LoewnerStatus loewner_driver_value(const struct LoewnerDriver *driver, double t, double *out);

// Trace of `driver` on `steps` uniform slit steps.
//
// # Safety
// `driver` must be a live handle and `out` writable.
enum LoewnerStatus loewner_solve_trace(const struct LoewnerDriver *driver,
                                       uintptr_t steps,
                                       struct LoewnerCurve **out);

// Driving function of the curve through `(re[k], im[k])`, refined to edges of at most `delta`.
//
// # Safety
// `re` and `im` must point to `n` readable doubles; `out` must be writable.
enum LoewnerStatus loewner_extract_driving(const double *re,
                                           const double *im,
                                           uintptr_t n,
                                           double delta,
                                           struct LoewnerDriver **out);

// Fractal curve at `level`, in its standard position. `kind` is a `LoewnerFractal` value.
//
// # Safety
// `out` must be writable.
enum LoewnerStatus loewner_fractal(int32_t kind, uint32_t level, struct LoewnerCurve **out);

// # Safety
// `curve` must come from this library and not be used afterwards. Null is ignored.
void loewner_curve_free(struct LoewnerCurve *curve);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `curve` must be null or a live handle.
uintptr_t loewner_curve_len(const struct LoewnerCurve *curve);

// Copies vertices and times into caller buffers of capacity `cap`; any buffer may be null.
// Asking for times of a curve without them is an invalid argument.
//
// # Safety
// Non-null buffers must hold `cap` writable doubles.
enum LoewnerStatus loewner_curve_points(const struct LoewnerCurve *curve,
                                        double *re,
                                        double *im,
                                        double *times,
                                        uintptr_t cap);

// Evolves `re + i im` from `t0` to `t1`. On capture `*captured` is 1 and `*out_re` holds the
// capture time; otherwise `*captured` is 0 and `(*out_re, *out_im)` is the image.
//
// # Safety
// `driver` must be a live handle; the outputs must be writable.
enum LoewnerStatus loewner_evolve_point(const struct LoewnerDriver *driver,
                                        double re,
                                        double im,
                                        double t0,
                                        double t1,
                                        double tol,
                                        double *out_re,
                                        double *out_im,
                                        int32_t *captured);

// Estimate of the Lip(1/2) seminorm `sup |λ(t) - λ(s)| / √|t - s|` over the samples.
//
// # Safety
// `driver` must be a live handle and `out` writable.
enum LoewnerStatus loewner_lip_norm(const struct LoewnerDriver *driver, double *out);

// Factored phase inequality margin for `0 < m < 4` and `epsilon > 0`.
//
// # Safety
// `out` must be writable.
enum LoewnerStatus loewner_phase_margin(double m, double epsilon, double *out);

// Driver whose trace passes within `tol` of each point `(xs[k], ys[k])`, `ys[k] > 0`.
//
// # Safety
// `xs` and `ys` must point to `n` readable doubles; `out` must be writable.
enum LoewnerStatus loewner_build_dense(const double *xs,
                                       const double *ys,
                                       uintptr_t n,
                                       double tol,
                                       struct LoewnerDriver **out);

// Library version as a static NUL-terminated string.
const char *loewner_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOEWNER_H */
