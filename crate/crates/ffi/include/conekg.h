#ifndef CONEKG_H
#define CONEKG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum ConekgStatus {
  CONEKG_STATUS_OK = 0,
  CONEKG_STATUS_NULL_POINTER = 1,
  CONEKG_STATUS_INVALID_ARGUMENT = 2,
  CONEKG_STATUS_OUTSIDE_CONE = 3,
  CONEKG_STATUS_MASS_MISMATCH = 4,
  CONEKG_STATUS_GRID_MISMATCH = 5,
  CONEKG_STATUS_NUMERICAL = 6,
  CONEKG_STATUS_PANIC = 7,
} ConekgStatus;

/**
 * Field data restricted to the null boundary.
 */
typedef struct ConekgBoundaryData ConekgBoundaryData;

/**
 * Discretization of the null boundary.
 */
typedef struct ConekgGrid ConekgGrid;

/**
 * Klein-Gordon solution in the double cone.
 */
typedef struct ConekgSolution ConekgSolution;

/**
 * Radial bump initial data: center, radius and the amplitudes of the field
 * and of its time derivative.
 */
typedef struct ConekgBump {
  double center[3];
  double radius;
  double amp_f;
  double amp_g;
} ConekgBump;

/**
 * Spacetime point (t, x).
 */
typedef struct ConekgPoint {
  double t;
  double x[3];
} ConekgPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *conekg_last_error(void);

/**
 * Solution with the given mass built from `n` bumps.
 *
 * # Safety
 * `bumps` must point to `n` values and `out` must be writable.
 */
enum ConekgStatus conekg_solution_new(double mass,
                                      const struct ConekgBump *bumps,
                                      uintptr_t n,
                                      struct ConekgSolution **out);

/**
 * # Safety
 * `s` must come from [`conekg_solution_new`] and not be used afterwards.
 */
void conekg_solution_free(struct ConekgSolution *s);

/**
 * Field value at a point of the double cone.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ConekgStatus conekg_solution_evaluate(const struct ConekgSolution *s,
                                           struct ConekgPoint p,
                                           double *out);

/**
 * Vacuum one-particle product Re <a, b>.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ConekgStatus conekg_vacuum_product(const struct ConekgSolution *a,
                                        const struct ConekgSolution *b,
                                        double *out);

/**
 * Cone grid with `panels` u panels of `per_panel` nodes and an
 * `n_theta` x `n_phi` sphere.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConekgStatus conekg_grid_new(uintptr_t panels,
                                  uintptr_t per_panel,
                                  uintptr_t n_theta,
                                  uintptr_t n_phi,
                                  struct ConekgGrid **out);

/**
 * # Safety
 * `g` must come from [`conekg_grid_new`] and not be used afterwards.
 */
void conekg_grid_free(struct ConekgGrid *g);

/**
 * Restriction of a solution to the null boundary.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ConekgStatus conekg_restrict(const struct ConekgSolution *s,
                                  const struct ConekgGrid *g,
                                  struct ConekgBoundaryData **out);

/**
 * # Safety
 * `d` must come from [`conekg_restrict`] and not be used afterwards.
 */
void conekg_boundary_data_free(struct ConekgBoundaryData *d);

/**
 * Symplectic form of two boundary data on the same grid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ConekgStatus conekg_sigma_boundary(const struct ConekgBoundaryData *a,
                                        const struct ConekgBoundaryData *b,
                                        double *out);

/**
 * Boundary-state product in momentum space; real and imaginary parts.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ConekgStatus conekg_boundary_product(const struct ConekgBoundaryData *a,
                                          const struct ConekgBoundaryData *b,
                                          double *out_re,
                                          double *out_im);

/**
 * Reconstructs the field of the given mass at `n` points from boundary data.
 *
 * # Safety
 * `points` must hold `n` values and `out` room for `n` doubles.
 */
enum ConekgStatus conekg_goursat_solve(const struct ConekgBoundaryData *d,
                                       double mass,
                                       const struct ConekgPoint *points,
                                       uintptr_t n,
                                       double *out);

/**
 * Field obtained by flowing the boundary data by `tau`, evaluated at `n` points.
 *
 * # Safety
 * `points` must hold `n` values and `out` room for `n` doubles.
 */
enum ConekgStatus conekg_flowed_field(const struct ConekgBoundaryData *d,
                                      double mass,
                                      double tau,
                                      const struct ConekgPoint *points,
                                      uintptr_t n,
                                      double *out);

/**
 * Squared interval -(t - t')^2 + |x - x'|^2.
 */
double conekg_sigma_distance(struct ConekgPoint p, struct ConekgPoint q);

/**
 * Flow of the null coordinate u in [0, 1] by `tau`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConekgStatus conekg_flow_u(double tau, double u, double *out);

/**
 * Null coordinate where the past cone of `p` meets the generator along `omega`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConekgStatus conekg_u_star(struct ConekgPoint p, const double (*omega)[3], double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CONEKG_H */
