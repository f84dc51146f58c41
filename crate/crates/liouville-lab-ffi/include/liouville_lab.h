#ifndef LIOUVILLE_LAB_H
#define LIOUVILLE_LAB_H

/* Generated by cbindgen from liouville-lab-ffi; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call across the C boundary.
typedef enum {
  // The call succeeded.
  LL_STATUS_OK = 0,
  // A required pointer argument was null.
  LL_STATUS_NULL_POINTER = 1,
  // The configuration or an argument violated a hypothesis.
  LL_STATUS_INVALID_ARGUMENT = 2,
  // The nonlinear solve or continuation did not converge.
  LL_STATUS_SOLVER_FAILURE = 3,
  // A panic was caught at the boundary; see `ll_last_error`.
  LL_STATUS_PANIC = 4,
} LlStatus;

// Opaque laboratory scene: mesh, singular weight, and potential, as
// described by a JSON configuration.
typedef struct LlLab LlLab;

// Scalar facts about one accepted solution.
typedef struct {
  double lambda;
  // `∫ λ V w e^u` by corrected quadrature.
  double total_mass;
  // Same integral with the potential dropped.
  double weight_mass;
  double peak;
  double u_center;
  double residual_norm;
  uint64_t newton_iters;
} LlSolveStats;

// One extracted concentration candidate.
typedef struct {
  double center_x;
  double center_y;
  // Concentration scale: distance to the boundary capped by the
  // separation from earlier candidates.
  double delta;
  double peak;
  double boundary_distance;
  // Mass of the claimed ball under the configured density.
  double local_mass;
  // `local_mass / 8π`, the quantization reading.
  double mass_over_8pi;
} LlCandidate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent failure on this thread, or an empty
// string. The pointer stays valid until the next failing call on the same
// thread.
const char *ll_last_error(void);

// Build a laboratory from a JSON configuration (`"{}"` selects every
// default) and store the handle in `out`.
//
// # Safety
// `config_json` must point to a NUL-terminated string and `out` to a
// writable handle slot. On any status other than `Ok`, `*out` is null.
LlStatus ll_lab_new(const char *config_json, LlLab **out);

// Release a handle obtained from [`ll_lab_new`]. A null handle is a no-op.
//
// # Safety
// `lab` must be null or a handle not yet freed.
void ll_lab_free(LlLab *lab);

// Number of mesh nodes; solution buffers hold exactly this many doubles.
//
// # Safety
// `lab` must be a live handle.
size_t ll_lab_node_count(const LlLab *lab);

// Copy node coordinates as interleaved pairs `x0 y0 x1 y1 …` into
// `out_xy`, which must hold `2 * ll_lab_node_count` doubles.
//
// # Safety
// `lab` must be a live handle and `out_xy` writable for the stated length.
LlStatus ll_lab_nodes(const LlLab *lab, double *out_xy);

// Solve at a fixed coupling `lambda` from the zero initial field and write
// the nodal solution into `u_out` (`ll_lab_node_count` doubles).
// `stats_out` may be null.
//
// # Safety
// `lab` must be a live handle and `u_out` writable for the stated length.
LlStatus ll_lab_solve_lambda(const LlLab *lab,
                             double lambda,
                             double *u_out,
                             LlSolveStats *stats_out);

// Continue the trivial branch to the prescribed total mass and write the
// nodal solution into `u_out` (`ll_lab_node_count` doubles). `stats_out`
// may be null.
//
// # Safety
// `lab` must be a live handle and `u_out` writable for the stated length.
LlStatus ll_lab_solve_mass(const LlLab *lab, double mass, double *u_out, LlSolveStats *stats_out);

// Extract concentration candidates from a nodal field `u` at coupling
// `lambda`, using the extraction settings of the handle's configuration.
// At most `capacity` candidates are written to `candidates_out`;
// `count_out` receives the number found (which may exceed `capacity`) and
// `exterior_sup_out` the field supremum outside every claimed ball (NaN
// when the balls cover the mesh). `exterior_sup_out` may be null.
//
// # Safety
// `lab` must be a live handle, `u` readable for `ll_lab_node_count`
// doubles, `candidates_out` writable for `capacity` entries, and
// `count_out` writable.
LlStatus ll_lab_extract(const LlLab *lab,
                        const double *u,
                        double lambda,
                        LlCandidate *candidates_out,
                        size_t capacity,
                        size_t *count_out,
                        double *exterior_sup_out);

// Dirichlet Green function of the unit disk, `G(x, y)`. Returns NaN when
// either point lies outside the closed disk or on the diagonal.
double ll_green_value(double x1, double x2, double y1, double y2);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LIOUVILLE_LAB_H */
