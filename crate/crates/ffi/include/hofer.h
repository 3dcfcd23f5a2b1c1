#ifndef HOFER_H
#define HOFER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_INVALID_MANIFOLD = 3,
  HC_STATUS_DOMAIN_VIOLATION = 4,
  HC_STATUS_UNSUPPORTED = 5,
  HC_STATUS_NUMERICAL_FAILURE = 6,
  HC_STATUS_VERIFICATION_FAILED = 7,
  HC_STATUS_INSUFFICIENT_PREMISES = 8,
  HC_STATUS_IO = 9,
  HC_STATUS_PANIC = 10,
} HcStatus;

/**
 * A Hamiltonian bound to a manifold.
 */
typedef struct HcHamiltonian HcHamiltonian;

/**
 * A manifold model.
 */
typedef struct HcManifold HcManifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *hc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void hc_string_free(char *s);

/**
 * Creates a manifold: `cp2`, `blowup` (uses `lambda`), `sphere`, `disk`,
 * `cp1xdisk`, `cp2xdisk` or `blowupxdisk` (use `disk_area`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum HcStatus hc_manifold_new(const char *name,
                              double lambda,
                              double disk_area,
                              struct HcManifold **out);

/**
 * # Safety
 * `m` must come from [`hc_manifold_new`] or be null.
 */
void hc_manifold_free(struct HcManifold *m);

/**
 * Liouville volume `∫ ω^n / n!`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_manifold_volume(const struct HcManifold *m, double *out);

/**
 * Parses a Hamiltonian expression such as `P`, `2P`, `Q` or `P+0.5*Q`.
 *
 * # Safety
 * `m` must be a live handle, `expr` NUL-terminated and `out` writable.
 */
enum HcStatus hc_hamiltonian_parse(const struct HcManifold *m,
                                   const char *expr,
                                   struct HcHamiltonian **out);

/**
 * # Safety
 * `h` must come from [`hc_hamiltonian_parse`] or be null.
 */
void hc_hamiltonian_free(struct HcHamiltonian *h);

/**
 * `H(x, t)` at homogeneous coordinates given as `len` doubles
 * `(re₀, im₀, re₁, im₁, …)`.
 *
 * # Safety
 * `coords` must hold `len` doubles; `h` live; `out` writable.
 */
enum HcStatus hc_hamiltonian_value(const struct HcHamiltonian *h,
                                   const double *coords,
                                   size_t len,
                                   double t,
                                   double *out);

/**
 * Hofer length estimate with its error bar.
 *
 * # Safety
 * `h` live; `value` and `error` writable.
 */
enum HcStatus hc_hofer_length(const struct HcHamiltonian *h,
                              size_t time_steps,
                              size_t samples,
                              uint64_t seed,
                              double *value,
                              double *error);

/**
 * Flows `coords` (unit-normalized homogeneous coordinates, `len` doubles)
 * from `t0` to `t1` and writes the normalized result back in place.
 *
 * # Safety
 * `coords` must hold `len` writable doubles; `h` live.
 */
enum HcStatus hc_flow(const struct HcHamiltonian *h,
                      double *coords,
                      size_t len,
                      double t0,
                      double t1,
                      double tol);

/**
 * Runs a verification suite (`flows`, `embeddings`, `regions`, `hz`,
 * `corrupted` or `all`). Writes the JSON report to `json_out` and whether
 * every check passed to `pass`.
 *
 * # Safety
 * `suite` NUL-terminated; `json_out` and `pass` writable.
 */
enum HcStatus hc_verify(const char *suite,
                        double epsilon,
                        double nu,
                        size_t probes,
                        double tol,
                        uint64_t seed,
                        char **json_out,
                        int *pass);

/**
 * Certifies length minimality of the rotation `expr` on `m`. `r1` is an
 * asserted `r₁(M)`; pass NaN for none. Writes the JSON outcome to
 * `json_out` and 1 to `pass` when a certificate was issued.
 *
 * # Safety
 * `m` live; `expr` NUL-terminated; `json_out` and `pass` writable.
 */
enum HcStatus hc_certify(const struct HcManifold *m,
                         const char *expr,
                         double epsilon,
                         double nu,
                         size_t probes,
                         uint64_t seed,
                         double r1,
                         char **json_out,
                         int *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOFER_H */
