#ifndef BLOWUP_LAB_H
#define BLOWUP_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_INPUT = 2,
  // Argument outside the domain of the profile or the evolution grid.
  BL_STATUS_DOMAIN = 3,
  BL_STATUS_NO_CONVERGENCE = 4,
  // Evolution exceeded its abort threshold.
  BL_STATUS_DIVERGED = 5,
  // Output buffer too small; the required size was written.
  BL_STATUS_BUFFER_TOO_SMALL = 6,
  // A Rust panic was caught at the boundary.
  BL_STATUS_PANIC = 7,
} BlStatus;

// Which linear problem a spectral call refers to.
typedef enum BlOperator {
  BL_OPERATOR_EIGEN = 0,
  BL_OPERATOR_SUSY = 1,
} BlOperator;

// Opaque certificate.
typedef struct BlCertificate BlCertificate;

// Opaque profile parameters for one dimension.
typedef struct BlProfile BlProfile;

// Opaque eigenvalue search result.
typedef struct BlSpectrum BlSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message of the calling thread (empty if none).
//
// # Safety
// `buf` must be null or valid for `len` bytes; `needed` null or writable.
enum BlStatus bl_last_error(char *buf, size_t len, size_t *needed);

// Profile parameters for dimension `d`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_profile_new(int64_t d, struct BlProfile **out);

// # Safety
// `p` must come from [`bl_profile_new`] and not be used afterwards.
void bl_profile_free(struct BlProfile *p);

// `a` and `b` of `φ₀(ρ) = aρ/√(b − ρ²)`.
//
// # Safety
// `p` must be a live handle; `a`, `b` writable.
enum BlStatus bl_profile_params(const struct BlProfile *p, double *a, double *b);

// `φ₀(ρ)` and `φ₀′(ρ)`; fails with `Domain` unless `ρ² < b`.
//
// # Safety
// `p` must be a live handle; `phi`, `dphi` writable.
enum BlStatus bl_profile_eval(const struct BlProfile *p, double rho, double *phi, double *dphi);

// Maximum profile ODE residual on the uniform grid `j/n`, `j = 1..=n`.
//
// # Safety
// `p` must be a live handle; `out` writable.
enum BlStatus bl_profile_residual(const struct BlProfile *p, size_t n, double *out);

// Exact certificate for `|δ₇| ≤ 1/3` on the imaginary axis.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_certify_delta7(struct BlCertificate **out);

// Negative-curvature certificate for dimension `d`, or for all `d ≥ 8`
// when `d` is 0.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_certify_curvature(int64_t d, struct BlCertificate **out);

// # Safety
// `c` must be a live handle; `passed` writable.
enum BlStatus bl_certificate_passed(const struct BlCertificate *c, bool *passed);

// Certificate as a NUL-terminated JSON document.
//
// # Safety
// `c` must be a live handle; see [`bl_last_error`] for the buffer contract.
enum BlStatus bl_certificate_json(const struct BlCertificate *c,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

// # Safety
// `c` must come from a certificate producer and not be used afterwards.
void bl_certificate_free(struct BlCertificate *c);

// Connection determinant `D(λ)`; zero exactly at eigenvalues.
//
// # Safety
// `out_re`, `out_im` must be writable.
enum BlStatus bl_determinant(enum BlOperator op,
                             double re,
                             double im,
                             double *out_re,
                             double *out_im);

// All eigenvalues in `[re_lo, re_hi] × [im_lo, im_hi]`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_spectrum_search(enum BlOperator op,
                                 double re_lo,
                                 double re_hi,
                                 double im_lo,
                                 double im_hi,
                                 double tol,
                                 struct BlSpectrum **out);

// Number of eigenvalues found.
//
// # Safety
// `s` must be a live handle; `len` writable.
enum BlStatus bl_spectrum_len(const struct BlSpectrum *s, size_t *len);

// Eigenvalue `i` (ordered by decreasing real part) and its residual.
//
// # Safety
// `s` must be a live handle; the out-pointers writable.
enum BlStatus bl_spectrum_get(const struct BlSpectrum *s,
                              size_t i,
                              double *re,
                              double *im,
                              double *residual);

// # Safety
// `s` must come from [`bl_spectrum_search`] and not be used afterwards.
void bl_spectrum_free(struct BlSpectrum *s);

// Blowup time recovered from the data of the self-similar solution that
// blows up at `t_prime`, viewed as a perturbation of the one at `t0`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_find_blowup_time(double t_prime, double t0, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOWUP_LAB_H */
