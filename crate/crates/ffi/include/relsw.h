#ifndef RELSW_H
#define RELSW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RelswStatus {
  RELSW_STATUS_OK = 0,
  RELSW_STATUS_NULL_POINTER = 1,
  RELSW_STATUS_INVALID_UTF8 = 2,
  // Malformed input.
  RELSW_STATUS_SCHEMA = 3,
  // A formula precondition does not hold.
  RELSW_STATUS_PRECONDITION = 4,
  // A numerical method did not converge.
  RELSW_STATUS_NUMERICAL = 5,
  RELSW_STATUS_INDEX_OUT_OF_RANGE = 6,
  RELSW_STATUS_BUFFER_TOO_SMALL = 7,
  RELSW_STATUS_PANIC = 8,
} RelswStatus;

// A pair (X, Σ) with its spin^c structures, built from a JSON spec.
typedef struct RelswPair RelswPair;

// A solved vortex problem.
typedef struct RelswVortex RelswVortex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *relsw_last_error_message(void);

// Parses a JSON spec (the CLI input format) and builds its pair.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum RelswStatus relsw_pair_from_json(const char *json, struct RelswPair **out);

// # Safety
// `pair` must come from [`relsw_pair_from_json`] and not be used afterwards.
void relsw_pair_free(struct RelswPair *pair);

// # Safety
// `pair` must be a live handle; `out` must be writable.
enum RelswStatus relsw_pair_genus(const struct RelswPair *pair, int64_t *out);

// # Safety
// `pair` must be a live handle; `out` must be writable.
enum RelswStatus relsw_pair_sigma_self(const struct RelswPair *pair, int64_t *out);

// # Safety
// `pair` must be a live handle; `out` must be writable.
enum RelswStatus relsw_pair_spinc_count(const struct RelswPair *pair, size_t *out);

// Dimension data of spin^c structure `index`: the main and adapted expected
// dimensions and twice the degree along Σ.
//
// # Safety
// `pair` must be a live handle; the out pointers must be writable.
enum RelswStatus relsw_pair_dimensions(const struct RelswPair *pair,
                                       size_t index,
                                       int64_t *d_main,
                                       int64_t *d_adapted,
                                       int64_t *twice_degree_along_sigma);

// Tunneling dimension; `adapted` is 0 or 1.
//
// # Safety
// `out` must be writable.
enum RelswStatus relsw_dim_tunneling(int64_t a,
                                     int64_t b_plus,
                                     int64_t b_minus,
                                     int64_t g,
                                     int64_t ell,
                                     int32_t adapted,
                                     int64_t *out);

// (dim Ker Q, dim₋ Q) in closed form.
//
// # Safety
// The out pointers must be writable.
enum RelswStatus relsw_q_signature(int64_t g,
                                   int64_t d_plus,
                                   int64_t d_minus,
                                   int64_t *dim_ker,
                                   int64_t *dim_neg);

// Spectral flow of H₀ + tP by eigenvalue crossings (row-major n×n inputs).
//
// # Safety
// `h0` and `p` must point to n·n doubles; `flow` must be writable.
enum RelswStatus relsw_spectral_flow(const double *h0,
                                     const double *p,
                                     size_t n,
                                     size_t samples,
                                     int64_t *flow);

// Spectral flow predicted from the resonance forms up to `depth`.
//
// # Safety
// `h0` and `p` must point to n·n doubles; `flow` must be writable.
enum RelswStatus relsw_resonance_flow(const double *h0,
                                      const double *p,
                                      size_t n,
                                      size_t depth,
                                      int64_t *flow);

// Solves the vortex equation on the torus with modulus `tau_re + i tau_im`.
// `divisor` holds `degree` points as (s, t) lattice coordinates; `seed` is
// used when `use_seed` is nonzero.
//
// # Safety
// `divisor` must point to 2·degree doubles (or be null when degree is 0);
// `out` must be writable.
enum RelswStatus relsw_vortex_solve(size_t grid,
                                    double modulus_re,
                                    double modulus_im,
                                    double area,
                                    double tau,
                                    const double *divisor,
                                    size_t degree,
                                    double tolerance,
                                    uint64_t seed,
                                    int32_t use_seed,
                                    struct RelswVortex **out);

// # Safety
// `v` must come from [`relsw_vortex_solve`] and not be used afterwards.
void relsw_vortex_free(struct RelswVortex *v);

// Scalar diagnostics of a solve: ∫ iF_A, the plaquette flux sum, the
// Newton residual and the zero count.
//
// # Safety
// `v` must be a live handle; the out pointers must be writable.
enum RelswStatus relsw_vortex_diagnostics(const struct RelswVortex *v,
                                          double *curvature_integral,
                                          double *plaquette_flux_sum,
                                          double *residual_sup,
                                          int64_t *zero_count);

// Copies |Φ| on the N×N grid (row-major) into `buf` of length `len`.
// With a null `buf`, only writes the required length to `needed`.
//
// # Safety
// `v` must be a live handle; `buf` must hold `len` doubles; `needed` must
// be writable.
enum RelswStatus relsw_vortex_phi_modulus(const struct RelswVortex *v,
                                          double *buf,
                                          size_t len,
                                          size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELSW_H */
