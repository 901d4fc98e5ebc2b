#ifndef MEMBRANE_EIG_H
#define MEMBRANE_EIG_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stddef.h>
#include <stdint.h>

typedef enum MeigStatus {
  MEIG_STATUS_OK = 0,
  MEIG_STATUS_NULL_POINTER = 1,
  MEIG_STATUS_INVALID_INPUT = 2,
  /*
   Singular values too close for the requested quantity.
   */
  MEIG_STATUS_DEGENERATE = 3,
  /*
   `I3` below the model floor, or an inadmissible element.
   */
  MEIG_STATUS_DOMAIN = 4,
  MEIG_STATUS_LINE_SEARCH_FAILED = 5,
  MEIG_STATUS_LINEAR_SOLVE_FAILED = 6,
  MEIG_STATUS_IO = 7,
  MEIG_STATUS_PANIC = 8,
} MeigStatus;

/*
 Opaque membrane problem (neo-Hookean sheet material).
 */
typedef struct MeigProblem MeigProblem;

typedef struct MeigSolveSummary {
  uintptr_t iterations;
  /*
   1 if the gradient tolerance was reached, 0 if `max_iters` ran out.
   */
  uint8_t converged;
  double energy;
  double grad_norm;
} MeigSolveSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *meig_version(void);

/*
 Message for the most recent failure on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *meig_last_error(void);

/*
 SVD `F = U Σ Vᵀ` with `det U = det V = +1`, `σ1 ≥ σ2 ≥ 0`.

 # Safety
 `f` must point to 6 doubles, `u` to 9, `sigma` to 2 and `v` to 4.
 */
enum MeigStatus meig_svd(const double *f, double *u, double *sigma, double *v);

/*
 Eigensystem of the Hessian of invariant `which` (1, 2 or 3) at `F`.

 # Safety
 `f` must point to 6 doubles, `lambda` to 6 and `q` to 36.
 */
enum MeigStatus meig_invariant_eigensystem(uint32_t which,
                                           const double *f,
                                           double *lambda,
                                           double *q);

/*
 Closed-form eigensystem of the neo-Hookean sheet Hessian at `F`.

 # Safety
 `f` must point to 6 doubles, `lambda` to 6 and `q` to 36.
 */
enum MeigStatus meig_sheet_eigensystem(double mu, const double *f, double *lambda, double *q);

/*
 Sheet energy density and, if `grad` is not NULL, its gradient in `F`.

 # Safety
 `f` must point to 6 doubles, `psi` to 1, and `grad` to 6 or be NULL.
 */
enum MeigStatus meig_sheet_energy(double mu, const double *f, double *psi, double *grad);

/*
 Builds a problem from rest positions (`3·n_vertices` doubles) and
 triangles (`3·n_triangles` zero-based indices). Release with
 [`meig_problem_free`].

 # Safety
 Array arguments must hold the stated number of elements; `out` must be
 writable.
 */
enum MeigStatus meig_problem_new(const double *rest,
                                 uintptr_t n_vertices,
                                 const uint32_t *triangles,
                                 uintptr_t n_triangles,
                                 double mu,
                                 struct MeigProblem **out);

/*
 Frees a problem; NULL is ignored.

 # Safety
 `problem` must come from [`meig_problem_new`] and not be used afterwards.
 */
void meig_problem_free(struct MeigProblem *problem);

/*
 Pins `vertex` at `target` (3 doubles).

 # Safety
 `problem` must be live; `target` must point to 3 doubles.
 */
enum MeigStatus meig_problem_pin(struct MeigProblem *problem,
                                 uintptr_t vertex,
                                 const double *target);

/*
 Sets the constant per-vertex external force (3 doubles).

 # Safety
 `problem` must be live; `force` must point to 3 doubles.
 */
enum MeigStatus meig_problem_set_external_force(struct MeigProblem *problem, const double *force);

/*
 Total energy at positions `x` (`3·n_vertices` doubles).

 # Safety
 `problem` must be live; `x` must hold `3·n_vertices` doubles and
 `energy` must be writable.
 */
enum MeigStatus meig_problem_energy(const struct MeigProblem *problem,
                                    const double *x,
                                    double *energy);

/*
 Quasi-static solve from `x0`; the result goes to `x_out` (both
 `3·n_vertices` doubles, may alias). `tol ≤ 0` or `max_iters = 0` select
 the defaults (1e-8 and 100). `summary` may be NULL.

 # Safety
 `problem` must be live; `x0` and `x_out` must hold `3·n_vertices`
 doubles.
 */
enum MeigStatus meig_problem_solve(const struct MeigProblem *problem,
                                   const double *x0,
                                   double tol,
                                   uintptr_t max_iters,
                                   double *x_out,
                                   struct MeigSolveSummary *summary);

/*
 Runs the randomized check suite; `failed` receives the number of failing
 checks.

 # Safety
 `failed` must be writable.
 */
enum MeigStatus meig_run_checks(uint64_t seed, uintptr_t trials, uintptr_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEMBRANE_EIG_H */
