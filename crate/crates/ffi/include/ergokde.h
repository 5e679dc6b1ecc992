#ifndef ERGOKDE_H
#define ERGOKDE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ErgokdeStatus {
  ERGOKDE_STATUS_OK = 0,
  ERGOKDE_STATUS_NULL_POINTER = 1,
  ERGOKDE_STATUS_VALIDATION = 2,
  ERGOKDE_STATUS_NUMERIC = 3,
  ERGOKDE_STATUS_SIMULATION = 4,
  ERGOKDE_STATUS_EMPTY_GRID = 5,
  ERGOKDE_STATUS_CONFIG = 6,
  ERGOKDE_STATUS_DEGENERATE_DATA = 7,
  ERGOKDE_STATUS_IO = 8,
  ERGOKDE_STATUS_BUFFER_TOO_SMALL = 9,
  ERGOKDE_STATUS_PANIC = 10,
} ErgokdeStatus;

// Density estimate on a tensor grid, last axis varying fastest.
typedef struct ErgokdeEstimate ErgokdeEstimate;

// Order-`ℓ` product kernel.
typedef struct ErgokdeKernel ErgokdeKernel;

// Sampled trajectory on a uniform time grid.
typedef struct ErgokdePath ErgokdePath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next failing call.
const char *ergokde_last_error(void);

// # Safety
// `out` must be valid for writing one pointer.
enum ErgokdeStatus ergokde_kernel_new(size_t dim, size_t order, struct ErgokdeKernel **out);

// # Safety
// `kernel` must be null or a handle from [`ergokde_kernel_new`] not yet freed.
void ergokde_kernel_free(struct ErgokdeKernel *kernel);

// Order after rounding even requests up.
//
// # Safety
// `kernel` must be a live handle; `out` valid for writing.
enum ErgokdeStatus ergokde_kernel_order(const struct ErgokdeKernel *kernel, size_t *out);

// `K(u)` for a point `u` of length `dim`.
//
// # Safety
// `u` must point to `dim` values; `out` valid for writing.
enum ErgokdeStatus ergokde_kernel_eval(const struct ErgokdeKernel *kernel,
                                       const double *u,
                                       size_t dim,
                                       double *out);

// Simulates `dX = -B X dt + dW` with `W` of covariance `Q` (both row-major `dim x dim`).
//
// A null `x0` starts from the stationary law. A negative `burn_in` selects the default rule.
//
// # Safety
// `b` and `q` must point to `dim * dim` values, `x0` to `dim` values or be null.
enum ErgokdeStatus ergokde_simulate_ou(size_t dim,
                                       const double *b,
                                       const double *q,
                                       double horizon,
                                       double dt,
                                       const double *x0,
                                       double burn_in,
                                       uint64_t seed,
                                       struct ErgokdePath **out);

// Wraps externally observed states, `rows` rows of `dim` values at spacing `dt`.
//
// # Safety
// `states` must point to `rows * dim` values.
enum ErgokdeStatus ergokde_path_from_states(size_t dim,
                                            double dt,
                                            const double *states,
                                            size_t rows,
                                            struct ErgokdePath **out);

// # Safety
// `path` must be null or a live path handle.
void ergokde_path_free(struct ErgokdePath *path);

// Dimension, number of stored rows (`n_steps + 1`) and step.
//
// # Safety
// `path` must be a live handle; each output pointer must be valid or null.
enum ErgokdeStatus ergokde_path_shape(const struct ErgokdePath *path,
                                      size_t *dim,
                                      size_t *rows,
                                      double *dt);

// Copies the row-major states into `buf`, which must hold `rows * dim` values.
//
// # Safety
// `buf` must be valid for `buf_len` writes.
enum ErgokdeStatus ergokde_path_states(const struct ErgokdePath *path, double *buf, size_t buf_len);

// Estimates on the grid with `points_per_axis` points per axis spanning `[lower, upper]`.
//
// # Safety
// `lower` and `upper` must point to `dim` values where `dim` is the path dimension.
enum ErgokdeStatus ergokde_estimate(const struct ErgokdePath *path,
                                    const struct ErgokdeKernel *kernel,
                                    double h,
                                    const double *lower,
                                    const double *upper,
                                    size_t points_per_axis,
                                    struct ErgokdeEstimate **out);

// # Safety
// `estimate` must be null or a live estimate handle.
void ergokde_estimate_free(struct ErgokdeEstimate *estimate);

// Number of grid points.
//
// # Safety
// `estimate` must be a live handle; `out` valid for writing.
enum ErgokdeStatus ergokde_estimate_len(const struct ErgokdeEstimate *estimate, size_t *out);

// # Safety
// `buf` must be valid for `buf_len` writes.
enum ErgokdeStatus ergokde_estimate_values(const struct ErgokdeEstimate *estimate,
                                           double *buf,
                                           size_t buf_len);

// Lepski-type selection on the grid `eta^{-l}`; `EmptyGrid` when the horizon is too short.
//
// # Safety
// As for [`ergokde_estimate`]; `out_h` valid for writing.
enum ErgokdeStatus ergokde_select_bandwidth(const struct ErgokdePath *path,
                                            const struct ErgokdeKernel *kernel,
                                            double eta,
                                            size_t k,
                                            const double *lower,
                                            const double *upper,
                                            size_t points_per_axis,
                                            double *out_h);

// `ψ_d(x)` for `x` in `(0, e)`.
//
// # Safety
// `out` valid for writing.
enum ErgokdeStatus ergokde_psi(double x, size_t dim, double *out);

// Variance proxy `σ(h, T)`.
//
// # Safety
// `out` valid for writing.
enum ErgokdeStatus ergokde_sigma(double h, double t, size_t dim, size_t k, double *out);

// Deviation bound `Υ(h, T, u)`.
//
// # Safety
// `out` valid for writing.
enum ErgokdeStatus ergokde_upsilon(double h, double t, double u, size_t dim, double *out);

// Pointwise rate `Φ`.
//
// # Safety
// `out` valid for writing.
enum ErgokdeStatus ergokde_rate_phi(size_t dim, double beta, double t, double *out);

// Sup-norm rate `Ψ`.
//
// # Safety
// `out` valid for writing.
enum ErgokdeStatus ergokde_rate_psi(size_t dim, double beta, double t, double *out);

// Asymptotic bandwidth, clipped to 1; `clipped` (may be null) reports whether clipping happened.
//
// # Safety
// `out_h` valid for writing; `clipped` valid or null.
enum ErgokdeStatus ergokde_theoretical_bandwidth(size_t dim,
                                                 double beta,
                                                 double t,
                                                 double c_h,
                                                 double *out_h,
                                                 bool *clipped);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGOKDE_H */
