#ifndef RINGFILL_H
#define RINGFILL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_ARGUMENT = 2,
  RF_STATUS_SCHEDULE_REJECTED = 3,
  RF_STATUS_CHECK_FAILED = 4,
  RF_STATUS_BUFFER_TOO_SMALL = 5,
  RF_STATUS_MALFORMED = 6,
  RF_STATUS_INTERNAL = 7,
  RF_STATUS_PANIC = 8,
} RfStatus;

/**
 * A built filling together with its schedule and layer ledger.
 */
typedef struct RfFilling RfFilling;

/**
 * Exact Lipschitz constant `delta_num / delta_den` and the pair attaining it.
 */
typedef struct RfVerification {
  uint64_t delta_num;
  uint64_t delta_den;
  bool is_isometric;
  uint32_t worst_x;
  uint32_t worst_y;
  uint32_t worst_d_k;
  uint32_t worst_d_c;
  uint64_t pairs_checked;
} RfVerification;

typedef struct RfDriftSummary {
  uint64_t annuli;
  uint64_t slanted_edges;
  /**
   * Whether every equal-length annulus attains its bound on every edge.
   */
  bool equal_annuli_attain_bound;
} RfDriftSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds `K_n`. `rho` and `eta` are decimal or `a/b` strings and are
 * parsed exactly. On success `*out` owns a new handle.
 *
 * # Safety
 * `rho` and `eta` must be nul-terminated strings; `out` must be writable.
 */
enum RfStatus rf_build(uint32_t n, const char *rho, const char *eta, struct RfFilling **out);

/**
 * Parses a build document produced by [`rf_filling_to_json`].
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum RfStatus rf_filling_from_json(const char *json, struct RfFilling **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from this library and must not be used afterwards.
 */
void rf_filling_free(struct RfFilling *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_boundary_length(const struct RfFilling *h, uint32_t *out);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_vertex_count(const struct RfFilling *h, uint64_t *out);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_triangle_count(const struct RfFilling *h, uint64_t *out);

/**
 * `|V| / n^2`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_density(const struct RfFilling *h, double *out);

/**
 * Copies triangles as consecutive vertex-id triples into `buf`, which holds
 * `capacity` ids. `*written` receives the number of ids needed; when it
 * exceeds `capacity` nothing is copied and `BufferTooSmall` is returned.
 * `buf` may be null when `capacity` is 0, to query the size.
 *
 * # Safety
 * `buf` must be writable for `capacity` ids; `written` must be writable.
 */
enum RfStatus rf_filling_copy_triangles(const struct RfFilling *h,
                                        uint32_t *buf,
                                        size_t capacity,
                                        size_t *written);

/**
 * Exact all-pairs boundary verification. Returns `Ok` whether or not the
 * filling is isometric; inspect `is_isometric`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_verify(const struct RfFilling *h, struct RfVerification *out);

/**
 * Exact rational drift audit. Returns `CheckFailed` on the first edge that
 * exceeds its bound.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_drift_audit(const struct RfFilling *h, struct RfDriftSummary *out);

/**
 * Largest discrepancy between the stepwise profile and its continuum limit.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_eps_n(const struct RfFilling *h, double *out);

/**
 * Serialises the filling with its schedule. Release with [`rf_string_free`].
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum RfStatus rf_filling_to_json(const struct RfFilling *h, char **out);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void rf_string_free(char *s);

/**
 * `rho + (1 - eta^3) / 6`, the asymptotic density of the construction.
 *
 * # Safety
 * `rho` and `eta` must be nul-terminated strings; `out` must be writable.
 */
enum RfStatus rf_density_bound(const char *rho, const char *eta, double *out);

/**
 * `(delta^3 / 8)(n - 1)^2 + (n - 1)/2`, the size any `delta`-Lipschitz
 * filling of `C_n` must reach.
 *
 * # Safety
 * `out` must be writable.
 */
enum RfStatus rf_lower_bound(uint32_t n, double delta, double *out);

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *rf_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *rf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RINGFILL_H */
