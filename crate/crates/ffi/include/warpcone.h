#ifndef WARPCONE_H
#define WARPCONE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum wc_status {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_PARAMETER = 2,
  WC_STATUS_UNSUPPORTED = 3,
  WC_STATUS_CAP_EXCEEDED = 4,
  WC_STATUS_METRIC_VIOLATION = 5,
  WC_STATUS_INJECTIVITY = 6,
  WC_STATUS_CONFIG = 7,
  WC_STATUS_PARSE = 8,
  WC_STATUS_IO = 9,
  WC_STATUS_OUT_OF_RANGE = 10,
  WC_STATUS_UTF8 = 11,
  /**
   * Some declared check of a scenario run failed.
   */
  WC_STATUS_ASSERTION_FAILED = 12,
  WC_STATUS_PANIC = 13,
} wc_status;

/**
 * A group action on a space handle.
 */
typedef struct wc_action wc_action;

/**
 * One level of the warped cone, with all pairwise distances.
 */
typedef struct wc_level wc_level;

/**
 * A finite net of a compact metric space.
 */
typedef struct wc_space wc_space;

/**
 * Spectral summary of a graph.
 */
typedef struct wc_spectrum {
  size_t vertices;
  size_t components;
  double lambda1_norm;
  double lambda1_comb;
  double cheeger_lower;
  double cheeger_upper;
  /**
   * Distortion lower bound, or NaN when not computed.
   */
  double d_lb;
} wc_spectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len` bytes). Returns the length the full
 * message needs including the terminator, or 0 when there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t wc_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wc_version(void);

/**
 * Uniform grid net of `resolution^dim` points on the flat torus.
 *
 * # Safety
 * `space_out` must be null or valid for writes.
 */
enum wc_status wc_space_torus(size_t dim, size_t resolution, struct wc_space **space_out);

/**
 * # Safety
 * `space` must be null or a handle from this library, not yet freed.
 */
void wc_space_free(struct wc_space *space);

/**
 * Number of net points, or 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t wc_space_len(const struct wc_space *space);

/**
 * # Safety
 * `space` must be a live handle and `dist_out` valid for writes.
 */
enum wc_status wc_space_dist(const struct wc_space *space, size_t i, size_t j, double *dist_out);

/**
 * Rotation of the torus by one turn per coordinate. Each turn is a
 * string `p/q`, `golden` or a decimal number of full turns.
 *
 * # Safety
 * `space` must be a live handle, `turns` must point to `count` valid
 * C strings and `action_out` must be valid for writes.
 */
enum wc_status wc_action_rotation(const struct wc_space *space,
                                  const char *const *turns,
                                  size_t count,
                                  struct wc_action **action_out);

/**
 * Standard action of SL(2, Z) on the 2-torus.
 *
 * # Safety
 * `space` must be a live handle and `action_out` valid for writes.
 */
enum wc_status wc_action_sl2(const struct wc_space *space, struct wc_action **action_out);

/**
 * Action of the trivial group.
 *
 * # Safety
 * `space` must be a live handle and `action_out` valid for writes.
 */
enum wc_status wc_action_trivial(const struct wc_space *space, struct wc_action **action_out);

/**
 * # Safety
 * `action` must be null or a live handle.
 */
void wc_action_free(struct wc_action *action);

/**
 * Warped distances at level `level` with the complete base graph.
 *
 * # Safety
 * `action` must be a live handle and `level_out` valid for writes.
 */
enum wc_status wc_level_build(const struct wc_action *action,
                              double level,
                              struct wc_level **level_out);

/**
 * # Safety
 * `level` must be null or a live handle.
 */
void wc_level_free(struct wc_level *level);

/**
 * Number of net points, or 0 for a null handle.
 *
 * # Safety
 * `level` must be null or a live handle.
 */
size_t wc_level_len(const struct wc_level *level);

/**
 * # Safety
 * `level` must be a live handle and `dist_out` valid for writes.
 */
enum wc_status wc_level_dist(const struct wc_level *level, size_t i, size_t j, double *dist_out);

/**
 * Spectrum of the level graph at `level`: unit shortcuts plus base pairs
 * at scaled distance at most 1.
 *
 * # Safety
 * `action` must be a live handle and `spectrum_out` valid for writes.
 */
enum wc_status wc_level_spectrum(const struct wc_action *action,
                                 double level,
                                 struct wc_spectrum *spectrum_out);

/**
 * Spectrum of the SL(2, Z) Schreier graph on the orbit of `(1, 0)` in
 * `(Z/n)^2`, including its distortion lower bound.
 *
 * # Safety
 * `spectrum_out` must be valid for writes.
 */
enum wc_status wc_schreier_spectrum(uint64_t modulus, struct wc_spectrum *spectrum_out);

/**
 * Run a scenario file, writing its CSV and manifest into `out_dir` (or
 * the directory the scenario names when null). Returns
 * `WC_STATUS_ASSERTION_FAILED` when the run completed but a check failed.
 *
 * # Safety
 * `config_path` must be a valid C string; `out_dir` must be null or one.
 */
enum wc_status wc_run_scenario(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPCONE_H */
