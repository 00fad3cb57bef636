#ifndef UNPREDICTABLE_H
#define UNPREDICTABLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum UpStatus {
  UP_STATUS_OK = 0,
  UP_STATUS_NULL_POINTER = 1,
  UP_STATUS_DOMAIN = 2,
  UP_STATUS_COVERAGE = 3,
  UP_STATUS_RESOURCE = 4,
  UP_STATUS_RESOLUTION = 5,
  UP_STATUS_PARSE = 6,
  UP_STATUS_INVALID_UTF8 = 7,
  UP_STATUS_BUFFER_TOO_SMALL = 8,
  UP_STATUS_PANIC = 9,
} UpStatus;

/*
 Opaque sequence window.
 */
typedef struct UpSequence UpSequence;

/*
 Opaque sampled trajectory.
 */
typedef struct UpTrajectory UpTrajectory;

/*
 Filter parameters; obtain defaults from [`up_filter_config_default`].
 */
typedef struct UpFilterConfig {
  double decay;
  double step;
  double sample_dt;
  double tolerance;
} UpFilterConfig;

typedef struct UpSeparationConstants {
  double kappa_i;
  double kappa_ii;
  double lower_bound;
} UpSeparationConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer is
 valid until the next library call on the same thread.
 */
const char *up_last_error_message(void);

/*
 Releases a string returned by this library. NULL is ignored.
 */
void up_string_free(char *s);

/*
 Builds a window from alphabet values and symbol indices.
 */
enum UpStatus up_sequence_new(const double *values,
                              size_t n_values,
                              int64_t first_index,
                              const uint16_t *symbols,
                              size_t n_symbols,
                              struct UpSequence **out);

/*
 Releases a sequence handle. NULL is ignored.
 */
void up_sequence_free(struct UpSequence *seq);

/*
 Number of symbols in the window, 0 for NULL.
 */
size_t up_sequence_len(const struct UpSequence *seq);

/*
 Index of the first symbol, 0 for NULL.
 */
int64_t up_sequence_first_index(const struct UpSequence *seq);

/*
 Copies the symbol indices into `buf`, which must hold `up_sequence_len`
 entries.
 */
enum UpStatus up_sequence_copy_symbols(const struct UpSequence *seq,
                                       uint16_t *buf,
                                       size_t capacity);

/*
 Symbol value at a sequence index.
 */
enum UpStatus up_sequence_value_at(const struct UpSequence *seq, int64_t index, double *out);

/*
 Parses the sequence text format.
 */
enum UpStatus up_sequence_parse(const char *text, struct UpSequence **out);

/*
 Sequence text format; release with `up_string_free`. NULL on a NULL handle.
 */
char *up_sequence_to_text(const struct UpSequence *seq);

/*
 `times` applications of the shift map.
 */
enum UpStatus up_sequence_shift(const struct UpSequence *seq,
                                uint64_t times,
                                struct UpSequence **out);

/*
 Distance truncated to `[-half_width, half_width]` and its tail bound.
 */
enum UpStatus up_metric_distance(const struct UpSequence *a,
                                 const struct UpSequence *b,
                                 uint32_t half_width,
                                 double *value,
                                 double *tail_bound);

/*
 Truncated return distances for shifts `1..=max_shift`; `out` must hold
 `max_shift` values.
 */
enum UpStatus up_orbit_return_distances(const struct UpSequence *seq,
                                        uint32_t half_width,
                                        uint64_t max_shift,
                                        double *out,
                                        size_t capacity);

/*
 Symbol (0 or 1) of the unpredictable point at `index`.
 */
uint8_t up_point_symbol(int64_t index);

/*
 Window of the unpredictable point.
 */
enum UpStatus up_point_window(int64_t first_index, size_t length, struct UpSequence **out);

/*
 Seeded Bernoulli realization, first index 0.
 */
enum UpStatus up_bernoulli_realize(const double *values,
                                   size_t n_values,
                                   const double *probabilities,
                                   size_t n_probabilities,
                                   uint64_t seed,
                                   size_t length,
                                   struct UpSequence **out);

struct UpFilterConfig up_filter_config_default(void);

/*
 Samples chi on `[t_start, t_end]` from `chi(t_start) = chi_start`; the
 sequence index `k` is placed on `[k*step, (k+1)*step)`.
 */
enum UpStatus up_chi_exact(const struct UpSequence *seq,
                           const struct UpFilterConfig *config,
                           double t_start,
                           double t_end,
                           double chi_start,
                           struct UpTrajectory **out);

/*
 Solution of `x' = -decay x + pi(t)`, `x(0) = phi0`, on `[0, t_end]`.
 */
enum UpStatus up_solve_ode(const struct UpSequence *seq,
                           const struct UpFilterConfig *config,
                           double phi0,
                           double t_end,
                           struct UpTrajectory **out);

/*
 Convolution integral over `[t - tail, t]` and the bound on the rest.
 */
enum UpStatus up_chi_quadrature(const struct UpSequence *seq,
                                const struct UpFilterConfig *config,
                                double t,
                                double tail,
                                double *value,
                                double *truncation_bound);

enum UpStatus up_separation_constants(double epsilon0, struct UpSeparationConstants *out);

/*
 Number of samples, 0 for NULL.
 */
size_t up_trajectory_len(const struct UpTrajectory *traj);

/*
 Copies times and values; both buffers must hold `up_trajectory_len`
 entries. Either pointer may be NULL to skip it.
 */
enum UpStatus up_trajectory_copy(const struct UpTrajectory *traj,
                                 double *times,
                                 double *values,
                                 size_t capacity);

/*
 `t,value` CSV with `digits` significant digits; NULL on error.
 */
char *up_trajectory_to_csv(const struct UpTrajectory *traj, size_t digits);

enum UpStatus up_trajectory_parse_csv(const char *text, struct UpTrajectory **out);

/*
 Releases a trajectory handle. NULL is ignored.
 */
void up_trajectory_free(struct UpTrajectory *traj);

/*
 Sequence witness search; writes the JSON report to `*json_out` (release
 with `up_string_free`).
 */
enum UpStatus up_verify_sequence(const struct UpSequence *seq,
                                 uint32_t half_width,
                                 double tolerance,
                                 double epsilon0,
                                 size_t count,
                                 char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNPREDICTABLE_H */
