/* C interface to the switched-feedback MAC capacity library. */

#ifndef SWITCHED_MAC_H
#define SWITCHED_MAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/* Opaque handles; create and destroy through the functions below. */
typedef struct SmChannel SmChannel;
typedef struct SmProfile SmProfile;


/**
 * Status codes returned by every fallible call.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_POINTER = 1,
  SM_STATUS_INVALID_ARGUMENT = 2,
  SM_STATUS_NON_CONVERGENCE = 3,
  SM_STATUS_RESOURCE_LIMIT = 4,
  SM_STATUS_INVALID_UTF8 = 5,
} SmStatus;

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sm_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *sm_version(void);

/**
 * Parse a channel from a JSON document (see the library's channel format).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid location; on
 * `SM_STATUS_OK` the caller owns the handle and must release it with
 * [`sm_channel_free`].
 */
enum SmStatus sm_channel_parse_json(const char *json, SmChannel **out);

/**
 * The binary additive MAC `Y = X1 + X2`.
 *
 * # Safety
 * `out` must be a valid location; the caller owns the returned handle.
 */
enum SmStatus sm_channel_binary_adder(SmChannel **out);

/**
 * The grouped-inputs construction with group size `alpha >= 2`.
 *
 * # Safety
 * `out` must be a valid location; the caller owns the returned handle.
 */
enum SmStatus sm_channel_example2(uint32_t alpha, SmChannel **out);

/**
 * Release a channel handle. Passing NULL is a no-op.
 *
 * # Safety
 * `ch` must be a handle returned by this library, not yet freed.
 */
void sm_channel_free(SmChannel *ch);

/**
 * Constant feedforward probability profile `p(t) = p`.
 *
 * # Safety
 * `out` must be a valid location; the caller owns the returned handle.
 */
enum SmStatus sm_profile_constant(double p, SmProfile **out);

/**
 * Feedback-first step profile with the given feedforward fraction.
 *
 * # Safety
 * `out` must be a valid location; the caller owns the returned handle.
 */
enum SmStatus sm_profile_step(double p_avg, SmProfile **out);

/**
 * Parse a profile from its JSON document (array of segments).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid location.
 */
enum SmStatus sm_profile_parse_json(const char *json, SmProfile **out);

/**
 * Release a profile handle. Passing NULL is a no-op.
 *
 * # Safety
 * `pr` must be a handle returned by this library, not yet freed.
 */
void sm_profile_free(SmProfile *pr);

/**
 * `max_{P(x1,x2)} I(X1,X2;Y)` in bits, within `tol` of the true maximum.
 *
 * # Safety
 * `ch` must be a live channel handle and `value_out` a valid location.
 */
enum SmStatus sm_max_joint_mi(const SmChannel *ch, double tol, double *value_out);

/**
 * 1 if the channel satisfies the shared-information class condition
 * (each input recoverable from the output and the other input), else 0.
 *
 * # Safety
 * `ch` must be a live channel handle and `holds_out` a valid location.
 */
enum SmStatus sm_class_check(const SmChannel *ch, uint8_t *holds_out);

/**
 * Largest constant feedforward probability for which the exact sum
 * characterisation holds (class channels only).
 *
 * # Safety
 * `ch` must be a live channel handle and `threshold_out` a valid location.
 */
enum SmStatus sm_theorem1_threshold(const SmChannel *ch, double *threshold_out);

/**
 * Shannon-type inner and outer bounds on the two-way sum-rate.
 *
 * # Safety
 * `ch` must be a live channel handle; both outputs valid locations.
 */
enum SmStatus sm_two_way_sum_bounds(const SmChannel *ch,
                                    uint32_t restarts,
                                    uint64_t seed,
                                    double *inner_out,
                                    double *outer_out);

/**
 * Cooperative outer bound on the sum rate,
 * `p_avg · max I(X1,X2;Y)`.
 *
 * # Safety
 * `ch` and `pr` must be live handles and `sum_out` a valid location.
 */
enum SmStatus sm_prop1_sum(const SmChannel *ch, const SmProfile *pr, double *sum_out);

/**
 * Known-switching-pattern sum-capacity interval, discretised to
 * `b_blocks` blocks. `u_size = 0` selects the default cardinality.
 *
 * # Safety
 * `ch` and `pr` must be live handles; both outputs valid locations.
 */
enum SmStatus sm_ksp_sum_interval(const SmChannel *ch,
                                  const SmProfile *pr,
                                  uint32_t b_blocks,
                                  uint32_t u_size,
                                  uint32_t restarts,
                                  uint64_t seed,
                                  double *inner_out,
                                  double *outer_out);

#endif  /* SWITCHED_MAC_H */
