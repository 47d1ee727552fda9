/* C interface for the npweyl surface-spectra library. */

#ifndef NPWEYL_H
#define NPWEYL_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum NpwStatus {
  NPW_STATUS_OK = 0,
  NPW_STATUS_INVALID_ARGUMENT = 1,
  NPW_STATUS_GEOMETRY = 2,
  NPW_STATUS_NUMERICS = 3,
} NpwStatus;

/**
 * Opaque discrete surface: nodes, weights, curvatures, Euler characteristic.
 */
typedef struct NpwQuadrature NpwQuadrature;

/**
 * Opaque solved spectrum: ordered eigenvalues plus singular values.
 */
typedef struct NpwSpectrum NpwSpectrum;

/**
 * Geometric invariants of a quadrature. `c_plus`/`c_minus` are NaN when the
 * signed split was not requested.
 */
typedef struct NpwGeometryReport {
  double area;
  double willmore_energy;
  double gauss_bonnet_integral;
  double gauss_bonnet_residual;
  int32_t euler_characteristic;
  double predicted_weyl_constant;
  double c_plus;
  double c_minus;
} NpwGeometryReport;

/**
 * Decay-constant fit over a rank window.
 */
typedef struct NpwWeylFit {
  double fitted_constant;
  double slope;
  uintptr_t j_min;
  uintptr_t j_max;
  double predicted_constant;
  double relative_deviation;
} NpwWeylFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a sphere quadrature.
 *
 * # Safety
 * `out` must be a valid pointer to a `NpwQuadrature*` slot.
 */
enum NpwStatus npw_quadrature_sphere(double rho,
                                     uintptr_t n_s,
                                     uintptr_t n_t,
                                     struct NpwQuadrature **out);

/**
 * Builds an ellipsoid quadrature.
 *
 * # Safety
 * `out` must be a valid pointer to a `NpwQuadrature*` slot.
 */
enum NpwStatus npw_quadrature_ellipsoid(double a,
                                        double b,
                                        double c,
                                        uintptr_t n_s,
                                        uintptr_t n_t,
                                        struct NpwQuadrature **out);

/**
 * Builds a torus quadrature (ring radius `big_r`, tube radius `small_r`).
 *
 * # Safety
 * `out` must be a valid pointer to a `NpwQuadrature*` slot.
 */
enum NpwStatus npw_quadrature_torus(double big_r,
                                    double small_r,
                                    uintptr_t n_s,
                                    uintptr_t n_t,
                                    struct NpwQuadrature **out);

/**
 * Builds the Willmore-minimizing torus of revolution.
 *
 * # Safety
 * `out` must be a valid pointer to a `NpwQuadrature*` slot.
 */
enum NpwStatus npw_quadrature_clifford(uintptr_t n_s, uintptr_t n_t, struct NpwQuadrature **out);

/**
 * Loads a closed triangle mesh (OFF or OBJ) as a quadrature.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid slot pointer.
 */
enum NpwStatus npw_quadrature_from_mesh(const char *path, struct NpwQuadrature **out);

/**
 * Releases a quadrature handle. Passing NULL is a no-op.
 *
 * # Safety
 * `quad` must be a pointer from one of the constructors, not yet freed.
 */
void npw_quadrature_free(struct NpwQuadrature *quad);

/**
 * Number of nodes, or 0 for NULL.
 *
 * # Safety
 * `quad` must be a live quadrature handle or NULL.
 */
uintptr_t npw_quadrature_node_count(const struct NpwQuadrature *quad);

/**
 * Total surface area (the sum of node weights), or NaN for NULL.
 *
 * # Safety
 * `quad` must be a live quadrature handle or NULL.
 */
double npw_quadrature_area(const struct NpwQuadrature *quad);

/**
 * Fills the geometric invariants. `signed_n_theta = 0` skips the signed
 * density split (the report then carries NaN in those slots); otherwise it
 * must be at least 64.
 *
 * # Safety
 * `quad` must be a live handle and `report` a valid struct pointer.
 */
enum NpwStatus npw_geometry_report(const struct NpwQuadrature *quad,
                                   uintptr_t signed_n_theta,
                                   struct NpwGeometryReport *report);

/**
 * Assembles the dense operator and solves for eigenvalues and singular
 * values. O(n^3): intended for node counts up to a few thousand.
 *
 * # Safety
 * `quad` must be a live handle and `out` a valid slot pointer.
 */
enum NpwStatus npw_spectrum_solve(const struct NpwQuadrature *quad, struct NpwSpectrum **out);

/**
 * Releases a spectrum handle. Passing NULL is a no-op.
 *
 * # Safety
 * `spectrum` must be a pointer from `npw_spectrum_solve`, not yet freed.
 */
void npw_spectrum_free(struct NpwSpectrum *spectrum);

/**
 * Number of eigenvalues, or 0 for NULL.
 *
 * # Safety
 * `spectrum` must be a live spectrum handle or NULL.
 */
uintptr_t npw_spectrum_len(const struct NpwSpectrum *spectrum);

/**
 * Largest |Im λ| over the spectrum, or NaN for NULL.
 *
 * # Safety
 * `spectrum` must be a live spectrum handle or NULL.
 */
double npw_spectrum_max_imag_residual(const struct NpwSpectrum *spectrum);

/**
 * Copies eigenvalues (ordered by descending modulus) into `re`/`im`, which
 * must hold `len` entries each; `len` must equal `npw_spectrum_len`.
 *
 * # Safety
 * `spectrum` must be live; `re` and `im` must point to `len` writable f64.
 */
enum NpwStatus npw_spectrum_eigenvalues(const struct NpwSpectrum *spectrum,
                                        double *re,
                                        double *im,
                                        uintptr_t len);

/**
 * Copies the nonincreasing singular values; `len` must equal the size.
 *
 * # Safety
 * `spectrum` must be live; `out` must point to `len` writable f64.
 */
enum NpwStatus npw_spectrum_singular_values(const struct NpwSpectrum *spectrum,
                                            double *out,
                                            uintptr_t len);

/**
 * Fits the decay constant over ranks [j_min, j_max] (pass 0, 0 for the
 * default window) against `predicted`.
 *
 * # Safety
 * `spectrum` must be live and `fit` a valid struct pointer.
 */
enum NpwStatus npw_weyl_fit(const struct NpwSpectrum *spectrum,
                            uintptr_t j_min,
                            uintptr_t j_max,
                            double predicted,
                            struct NpwWeylFit *fit);

/**
 * Writes the first `count` entries of the exact sphere spectrum
 * (1/(2(2k+1)) with multiplicity 2k+1, descending).
 *
 * # Safety
 * `out` must point to `count` writable f64.
 */
enum NpwStatus npw_exact_sphere_spectrum(double *out, uintptr_t count);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`); returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be NULL (query the length).
 */
uintptr_t npw_last_error_message(char *buf, uintptr_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NPWEYL_H */
