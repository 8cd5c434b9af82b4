#ifndef DELAYRES_H
#define DELAYRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DelayresStatus {
  DELAYRES_STATUS_OK = 0,
  DELAYRES_STATUS_NULL_POINTER = 1,
  DELAYRES_STATUS_INVALID_ARGUMENT = 2,
  DELAYRES_STATUS_DIMENSION_MISMATCH = 3,
  /**
   * Degenerate data: zero variance, singular system, infeasible program.
   */
  DELAYRES_STATUS_NUMERICAL = 4,
  /**
   * The output bound needs αL < 1/√2.
   */
  DELAYRES_STATUS_BOUND_UNDEFINED = 5,
  DELAYRES_STATUS_BUFFER_TOO_SMALL = 6,
  DELAYRES_STATUS_PANIC = 7,
} DelayresStatus;

typedef enum DelayresNonlinearity {
  DELAYRES_NONLINEARITY_TANH = 0,
  DELAYRES_NONLINEARITY_SINE = 1,
  /**
   * `tanh(gain·x)`
   */
  DELAYRES_NONLINEARITY_SCALED_TANH = 2,
} DelayresNonlinearity;

typedef enum DelayresFeedback {
  DELAYRES_FEEDBACK_DELAYED = 0,
  DELAYRES_FEEDBACK_INSTANTANEOUS = 1,
} DelayresFeedback;

/**
 * Opaque reservoir configuration.
 */
typedef struct DelayresReservoir DelayresReservoir;

/**
 * Opaque state trajectory, `len + 1` columns of `nodes` states.
 */
typedef struct DelayresTrajectory DelayresTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *delayres_last_error(void);

/**
 * `gain` is read only for `ScaledTanh`.
 *
 * # Safety
 * `out_reservoir` must be a valid pointer to writable storage for one handle.
 */
enum DelayresStatus delayres_reservoir_new(size_t n,
                                           double alpha,
                                           double beta,
                                           enum DelayresNonlinearity nonlinearity,
                                           double gain,
                                           enum DelayresFeedback feedback,
                                           struct DelayresReservoir **out_reservoir);

/**
 * # Safety
 * `reservoir` must be null or a handle from [`delayres_reservoir_new`] not yet freed.
 */
void delayres_reservoir_free(struct DelayresReservoir *reservoir);

/**
 * Number of nodes, `N + 1`; 0 for a null handle.
 *
 * # Safety
 * `reservoir` must be null or a live handle.
 */
size_t delayres_reservoir_node_count(const struct DelayresReservoir *reservoir);

/**
 * Drives the reservoir with `u(1..=len)` from the zero state.
 *
 * # Safety
 * `u` must point to `len` readable doubles; `out_trajectory` must be writable.
 */
enum DelayresStatus delayres_reservoir_run(const struct DelayresReservoir *reservoir,
                                           const double *u,
                                           size_t len,
                                           struct DelayresTrajectory **out_trajectory);

/**
 * # Safety
 * `trajectory` must be null or a handle from [`delayres_reservoir_run`] not yet freed.
 */
void delayres_trajectory_free(struct DelayresTrajectory *trajectory);

/**
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t delayres_trajectory_nodes(const struct DelayresTrajectory *trajectory);

/**
 * Input length `M`; the trajectory holds times `0..=M`.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t delayres_trajectory_len(const struct DelayresTrajectory *trajectory);

/**
 * Copies all states, time-major: `buf[t * nodes + k] = x_k(t)`.
 * Needs `(len + 1) * nodes` slots.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum DelayresStatus delayres_trajectory_copy_states(const struct DelayresTrajectory *trajectory,
                                                    double *buf,
                                                    size_t buf_len);

/**
 * Readout `y(t) = w·x(t)` for `t = 1..=len`, written to `out[0..len]`.
 *
 * # Safety
 * `w` must hold `w_len` doubles, `out` must have room for `out_len`.
 */
enum DelayresStatus delayres_readout_output(const struct DelayresTrajectory *trajectory,
                                            const double *w,
                                            size_t w_len,
                                            double *out_y,
                                            size_t out_len);

/**
 * Whether `alpha * lipschitz < 1/√2`.
 */
bool delayres_contraction_valid(double alpha, double lipschitz);

/**
 * Output Lipschitz constant `C` for inputs of length `m` and a readout of
 * norm `weight_norm`.
 *
 * # Safety
 * `reservoir` must be a live handle, `out_c` writable.
 */
enum DelayresStatus delayres_theoretical_constant(const struct DelayresReservoir *reservoir,
                                                  size_t m,
                                                  double weight_norm,
                                                  double *out_c);

/**
 * `‖y_u − y_v‖² / ‖u − v‖²`, the shorter input zero-padded.
 *
 * # Safety
 * Arrays must hold the stated number of doubles, `out_ratio` writable.
 */
enum DelayresStatus delayres_empirical_ratio(const struct DelayresReservoir *reservoir,
                                             const double *w,
                                             size_t w_len,
                                             const double *u,
                                             size_t u_len,
                                             const double *v,
                                             size_t v_len,
                                             double *out_ratio);

/**
 * # Safety
 * `y` and `target` must hold `len` doubles, `out_nrmse` writable.
 */
enum DelayresStatus delayres_nrmse(const double *y,
                                   const double *target,
                                   size_t len,
                                   double *out_nrmse);

/**
 * Ridge readout from a design of `cols` state vectors, each `nodes` long,
 * stored one after another. Writes `nodes` weights.
 *
 * # Safety
 * `states` must hold `nodes * cols` doubles, `target` `cols`, and
 * `out_w` must have room for `out_len` doubles.
 */
enum DelayresStatus delayres_train_ridge(const double *states,
                                         size_t nodes,
                                         size_t cols,
                                         const double *target,
                                         double lambda,
                                         double *out_w,
                                         size_t out_len);

/**
 * Separation of `count` state vectors of length `dim`, stored one after
 * another, with `labels[i]` the class of vector `i`.
 *
 * # Safety
 * `states` must hold `count * dim` doubles and `labels` `count` entries;
 * output pointers must be writable.
 */
enum DelayresStatus delayres_separation(const double *states,
                                        size_t dim,
                                        const size_t *labels,
                                        size_t count,
                                        double *out_inter,
                                        double *out_intra,
                                        double *out_sep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DELAYRES_H */
