#ifndef DIRAC_SPECTRA_H
#define DIRAC_SPECTRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `tag` values for the threshold-phase functions.
 */
#define DS_TAG_HP_MMINUS 0

#define DS_TAG_HP_MPLUS 1

#define DS_TAG_L_IMPLUS 2

/**
 * `kind` values for [`ds_h_spectrum`].
 */
#define DS_KIND_H_MINUS 0

#define DS_KIND_H_PLUS 1

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_ARGUMENT = 2,
  DS_STATUS_DOMAIN = 3,
  DS_STATUS_NO_SOLITARY_WAVE = 4,
  DS_STATUS_NEGATIVE_RADICAND = 5,
  DS_STATUS_STEP_UNDERFLOW = 6,
  DS_STATUS_NON_CONVERGENCE = 7,
  DS_STATUS_DEGENERATE_DIRECTION = 8,
  DS_STATUS_NO_CROSSING = 9,
  DS_STATUS_IO = 10,
  DS_STATUS_PANIC = 11,
} DsStatus;

/**
 * Opaque sampled solitary wave.
 */
typedef struct DsProfile DsProfile;

typedef struct DsPoint {
  double x;
  double v;
  double u;
} DsPoint;

typedef struct DsEvans {
  double e_minus_re;
  double e_minus_im;
  double e_plus_re;
  double e_plus_im;
  double scale;
} DsEvans;

typedef struct DsZero {
  double re;
  double im;
  /**
   * 0 for the `X-` Evans function, 1 for `X+`.
   */
  uint32_t parity_class;
  uint32_t multiplicity;
  double abs_e;
} DsZero;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *ds_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ds_version(void);

/**
 * Closed-form Gross-Neveu wave on `[-r, r]` with spacing `h`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum DsStatus ds_profile_closed_form(double omega, double r, double h, struct DsProfile **out);

/**
 * Wave of `G(X) = c[1] X + c[2] X^2 + ...` by quadrature; `n_coeffs = 0` selects
 * Gross-Neveu. `coeffs[0]` must be zero.
 *
 * # Safety
 * `coeffs` must point to `n_coeffs` doubles (or be null when `n_coeffs` is 0);
 * `out` must be null or valid for writing one pointer.
 */
enum DsStatus ds_profile_quadrature(const double *coeffs,
                                    size_t n_coeffs,
                                    double omega,
                                    double r,
                                    double h,
                                    struct DsProfile **out);

/**
 * # Safety
 * `p` must be null or a handle from this library that has not been freed.
 */
void ds_profile_free(struct DsProfile *p);

/**
 * Number of grid points, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t ds_profile_len(const struct DsProfile *p);

/**
 * # Safety
 * `p` must be null or a live handle; `out` null or writable.
 */
enum DsStatus ds_profile_sample(const struct DsProfile *p, size_t i, struct DsPoint *out);

/**
 * `E-` and `E+` at `re + i im` with matching radius `r`.
 *
 * # Safety
 * `p` must be null or a live handle; `out` null or writable.
 */
enum DsStatus ds_evans_pair(const struct DsProfile *p,
                            double re,
                            double im,
                            double r,
                            struct DsEvans *out);

/**
 * Zero of the Evans functions near `re + i im`.
 *
 * # Safety
 * `p` must be null or a live handle; `out` null or writable.
 */
enum DsStatus ds_refine_zero(const struct DsProfile *p,
                             double re,
                             double im,
                             double r,
                             struct DsZero *out);

/**
 * Eigenvalues of `H-` or `H+` in `[lo, hi]`. At most `cap` values are written to
 * `out`; `count` receives the total, so a second call with a larger buffer can follow.
 *
 * # Safety
 * `p` must be null or a live handle; `out` must hold `cap` doubles (may be null if
 * `cap` is 0); `count` null or writable.
 */
enum DsStatus ds_h_spectrum(const struct DsProfile *p,
                            uint32_t kind,
                            double lo,
                            double hi,
                            double step,
                            double r,
                            double *out,
                            size_t cap,
                            size_t *count);

/**
 * Unwrapped phase of the threshold solution, integrated to `r`.
 *
 * # Safety
 * `p` must be null or a live handle; `out` null or writable.
 */
enum DsStatus ds_threshold_phase(const struct DsProfile *p, uint32_t tag_id, double r, double *out);

/**
 * WKB approximation of the threshold phase.
 *
 * # Safety
 * `p` must be null or a live handle; `out` null or writable.
 */
enum DsStatus ds_wkb_phase(const struct DsProfile *p, uint32_t tag_id, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC_SPECTRA_H */
