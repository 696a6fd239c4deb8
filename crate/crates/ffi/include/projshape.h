#ifndef PROJSHAPE_H
#define PROJSHAPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define PS_OK 0

#define PS_E_NULL_POINTER 1

#define PS_E_ARGUMENT 2

#define PS_E_PARSE 3

#define PS_E_VALIDATION 4

#define PS_E_DEGENERATE_FRAME 10

#define PS_E_POINT_AT_INFINITY 11

#define PS_E_NOT_CONCENTRATED 12

#define PS_E_MEAN_NOT_UNIQUE 13

#define PS_E_SINGULAR_COVARIANCE 14

#define PS_E_INSUFFICIENT_DATA 15

#define PS_E_UNDEFINED_MEAN_DIRECTION 16

#define PS_E_BOOTSTRAP_UNSTABLE 17

#define PS_E_AT_INFINITY 18

#define PS_E_IO 20

#define PS_E_INTERNAL 70

#define PS_E_PANIC 71

/**
 * A projective frame of m + 2 points in ℝᵐ.
 */
typedef struct PsFrame PsFrame;

/**
 * A growable sample of projective shapes with common m and q.
 */
typedef struct PsSample PsSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len`) and returns the full message length in bytes.
 */
size_t ps_last_error_message(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *ps_status_name(int32_t status);

/**
 * Builds a frame from `(m + 2) * m` row-major coordinates.
 */
int32_t ps_frame_new(const double *points, size_t m, struct PsFrame **out);

void ps_frame_free(struct PsFrame *frame);

/**
 * Spherical projective coordinate of `x` (m values) written to `out_z`
 * (m + 1 values).
 */
int32_t ps_frame_coordinate(const struct PsFrame *frame, const double *x, size_t m, double *out_z);

/**
 * Cross-ratio `(x − x2)(x1 − x3) / ((x3 − x2)(x1 − x))`; fails with
 * [`PS_E_POINT_AT_INFINITY`] when `x = x1`.
 */
int32_t ps_cross_ratio(double x1, double x2, double x3, double x, double *out);

int32_t ps_sample_new(size_t m, size_t q, struct PsSample **out);

void ps_sample_free(struct PsSample *sample);

size_t ps_sample_len(const struct PsSample *sample);

/**
 * Appends a shape given as q axes of m + 1 coordinates (`q * (m + 1)` values).
 */
int32_t ps_sample_push_axes(struct PsSample *sample, const double *axes);

/**
 * Registers `m + 2 + q` landmarks (row-major, m values each) in the frame
 * of the first m + 2 and appends the resulting shape.
 */
int32_t ps_sample_push_landmarks(struct PsSample *sample, const double *landmarks);

/**
 * Extrinsic mean written as q axes (`q * (m + 1)` values).
 */
int32_t ps_extrinsic_mean(const struct PsSample *sample, double *out_axes);

/**
 * Chi-squared test of `H0: extrinsic mean = mu0` (q axes, `q * (m + 1)`
 * values) with mq degrees of freedom. `p_value` may be null.
 */
int32_t ps_extrinsic_test(const struct PsSample *sample,
                          const double *mu0,
                          double *statistic,
                          double *p_value);

/**
 * Bootstrap p-value of the extrinsic test with `b` resamples.
 */
int32_t ps_extrinsic_bootstrap_test(const struct PsSample *sample,
                                    const double *mu0,
                                    size_t b,
                                    uint64_t seed,
                                    double *statistic,
                                    double *p_value);

/**
 * Two-sample tangent-space Hotelling test. The F statistic and its degrees
 * of freedom are written out; any output pointer except `statistic` may
 * be null.
 */
int32_t ps_two_sample_hotelling(const struct PsSample *a,
                                const struct PsSample *b,
                                double *statistic,
                                double *p_value,
                                double *df1,
                                double *df2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROJSHAPE_H */
