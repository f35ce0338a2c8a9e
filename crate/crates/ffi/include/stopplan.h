#ifndef STOPPLAN_H
#define STOPPLAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_ARGUMENT = 2,
  SP_STATUS_INVALID_COORDINATE = 3,
  SP_STATUS_WORKSPACE_TOO_LARGE = 4,
  SP_STATUS_EMPTY_INPUT = 5,
  SP_STATUS_NO_CENTERS = 6,
  SP_STATUS_TOO_FEW_STOPS = 7,
  SP_STATUS_DUPLICATE_STOPS = 8,
  SP_STATUS_INSTANCE_TOO_LARGE = 9,
  SP_STATUS_FILE_NOT_FOUND = 10,
  SP_STATUS_PARSE = 11,
  SP_STATUS_IO = 12,
  SP_STATUS_BUFFER_TOO_SMALL = 13,
  SP_STATUS_INDEX_OUT_OF_RANGE = 14,
  SP_STATUS_PANIC = 15,
} SpStatus;

/**
 * Owned clustering result.
 */
typedef struct SpClusters SpClusters;

/**
 * Owned list of coordinates (houses or stops).
 */
typedef struct SpPoints SpPoints;

/**
 * Owned closed tour.
 */
typedef struct SpTour SpTour;

/**
 * Mean-shift settings; see `sp_mean_shift_config_default`.
 */
typedef struct SpMeanShiftConfig {
  double bandwidth;
  double convergence_eps;
  size_t max_iterations;
  double merge_radius;
  double kernel_cutoff;
} SpMeanShiftConfig;

/**
 * One row of the bandwidth summary table. Error distances are in km and are
 * NaN when `error_count` is zero.
 */
typedef struct SpCoverageReport {
  double bandwidth;
  size_t total_houses;
  size_t error_count;
  double error_percentage;
  double max_error_km;
  double min_error_km;
  double median_error_km;
  size_t stops_spawned;
} SpCoverageReport;

/**
 * Ant colony settings; see `sp_aco_params_default`.
 */
typedef struct SpAcoParams {
  double alpha;
  double beta;
  double rho;
  size_t n_ants;
  size_t n_iterations;
  double deposit_q;
  double initial_tau;
  uint64_t seed;
} SpAcoParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *sp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sp_version(void);

/**
 * Copies `n` coordinate pairs into a new handle.
 *
 * # Safety
 * `lats` and `lons` must each point to `n` readable doubles; `out` must be writable.
 */
enum SpStatus sp_points_new(const double *lats,
                            const double *lons,
                            size_t n,
                            struct SpPoints **out);

/**
 * Loads houses from a `lat,lon` CSV or GeoJSON FeatureCollection.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SpStatus sp_points_load(const char *path, struct SpPoints **out);

/**
 * Number of points; 0 for NULL.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t sp_points_len(const struct SpPoints *points);

/**
 * # Safety
 * `points` must be a live handle; `lat` and `lon` must be writable.
 */
enum SpStatus sp_points_get(const struct SpPoints *points, size_t index, double *lat, double *lon);

/**
 * # Safety
 * `points` must be NULL or a handle not yet freed.
 */
void sp_points_free(struct SpPoints *points);

/**
 * Great-circle distance in meters.
 *
 * # Safety
 * `out` must be writable.
 */
enum SpStatus sp_haversine_distance(double lat1,
                                    double lon1,
                                    double lat2,
                                    double lon2,
                                    double *out);

struct SpMeanShiftConfig sp_mean_shift_config_default(double bandwidth);

/**
 * # Safety
 * `houses` and `config` must be live; `out` must be writable.
 */
enum SpStatus sp_mean_shift(const struct SpPoints *houses,
                            const struct SpMeanShiftConfig *config,
                            struct SpClusters **out);

/**
 * # Safety
 * `clusters` must be NULL or a live handle.
 */
size_t sp_clusters_len(const struct SpClusters *clusters);

/**
 * Copies the centers into a new points handle (usable as route stops).
 *
 * # Safety
 * `clusters` must be live; `out` must be writable.
 */
enum SpStatus sp_clusters_centers(const struct SpClusters *clusters, struct SpPoints **out);

/**
 * Writes each house's center index into `buf` (capacity `cap`).
 * `written` receives the number of houses even when the buffer is too small.
 *
 * # Safety
 * `buf` must hold `cap` writable elements; `written` must be writable.
 */
enum SpStatus sp_clusters_assignment(const struct SpClusters *clusters,
                                     size_t *buf,
                                     size_t cap,
                                     size_t *written);

/**
 * # Safety
 * `clusters` must be NULL or a handle not yet freed.
 */
void sp_clusters_free(struct SpClusters *clusters);

/**
 * # Safety
 * `houses` and `centers` must be live; `out` must be writable.
 */
enum SpStatus sp_coverage_report(const struct SpPoints *houses,
                                 const struct SpPoints *centers,
                                 double radius,
                                 struct SpCoverageReport *out);

struct SpAcoParams sp_aco_params_default(uint64_t seed);

/**
 * # Safety
 * `stops` and `params` must be live; `out` must be writable.
 */
enum SpStatus sp_aco_solve(const struct SpPoints *stops,
                           const struct SpAcoParams *params,
                           struct SpTour **out);

/**
 * Exact shortest tour (at most 11 stops).
 *
 * # Safety
 * `stops` must be live; `out` must be writable.
 */
enum SpStatus sp_brute_force_tsp(const struct SpPoints *stops, struct SpTour **out);

/**
 * Number of stops in the tour; 0 for NULL.
 *
 * # Safety
 * `tour` must be NULL or a live handle.
 */
size_t sp_tour_len(const struct SpTour *tour);

/**
 * Closed-cycle length in meters; NaN for NULL.
 *
 * # Safety
 * `tour` must be NULL or a live handle.
 */
double sp_tour_length_m(const struct SpTour *tour);

/**
 * Writes the visiting order (0-based stop indices) into `buf`.
 *
 * # Safety
 * `buf` must hold `cap` writable elements; `written` must be writable.
 */
enum SpStatus sp_tour_order(const struct SpTour *tour, size_t *buf, size_t cap, size_t *written);

/**
 * # Safety
 * `tour` must be NULL or a handle not yet freed.
 */
void sp_tour_free(struct SpTour *tour);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOPPLAN_H */
