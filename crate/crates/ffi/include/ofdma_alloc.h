#ifndef OFDMA_ALLOC_H
#define OFDMA_ALLOC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OfdmaStatus {
  OFDMA_STATUS_OK = 0,
  OFDMA_STATUS_NULL_POINTER = 1,
  OFDMA_STATUS_INVALID_ARGUMENT = 2,
  OFDMA_STATUS_CONFIG = 3,
  OFDMA_STATUS_DOMAIN = 4,
  OFDMA_STATUS_CONTRACT = 5,
  OFDMA_STATUS_ORACLE_CAP = 6,
  OFDMA_STATUS_IO = 7,
  OFDMA_STATUS_PARSE = 8,
  OFDMA_STATUS_CSV = 9,
  OFDMA_STATUS_PANIC = 10,
} OfdmaStatus;

typedef enum OfdmaAlgorithm {
  OFDMA_ALGORITHM_MWDG = 0,
  OFDMA_ALGORITHM_RG = 1,
  OFDMA_ALGORITHM_MEG = 2,
} OfdmaAlgorithm;

typedef enum OfdmaPowerMode {
  OFDMA_POWER_MODE_UNIFORM = 0,
  OFDMA_POWER_MODE_DPRA = 1,
} OfdmaPowerMode;

/**
 * Scenario configuration handle.
 */
typedef struct OfdmaConfig OfdmaConfig;

/**
 * Summary table handle.
 */
typedef struct OfdmaResults OfdmaResults;

/**
 * One summary row. Interval half-widths and η fields are NaN when undefined.
 */
typedef struct OfdmaRow {
  enum OfdmaAlgorithm algorithm;
  enum OfdmaPowerMode power_mode;
  size_t max_prbs;
  size_t users_per_cell;
  size_t ipp_iterations;
  size_t drops;
  double mean_dropped;
  double ci_dropped;
  double mean_eta;
  double ci_eta;
  double mean_total_power_w;
} OfdmaRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ofdma_last_error(void);

/**
 * Reference-parameter configuration.
 */
enum OfdmaStatus ofdma_config_default(struct OfdmaConfig **out);

/**
 * Configuration parsed from a TOML file.
 */
enum OfdmaStatus ofdma_config_from_file(const char *path, struct OfdmaConfig **out);

/**
 * Configuration parsed from TOML text.
 */
enum OfdmaStatus ofdma_config_from_toml(const char *text, struct OfdmaConfig **out);

void ofdma_config_free(struct OfdmaConfig *config);

enum OfdmaStatus ofdma_config_set_seed(struct OfdmaConfig *config, uint64_t seed);

enum OfdmaStatus ofdma_config_set_drops(struct OfdmaConfig *config, size_t drops);

enum OfdmaStatus ofdma_config_set_max_prbs(struct OfdmaConfig *config, size_t max_prbs);

enum OfdmaStatus ofdma_config_set_users(struct OfdmaConfig *config,
                                        const size_t *users,
                                        size_t len);

enum OfdmaStatus ofdma_config_set_ipp(struct OfdmaConfig *config, const size_t *depths, size_t len);

/**
 * Comma-separated list of `mwdg`, `rg`, `meg`.
 */
enum OfdmaStatus ofdma_config_set_algorithms(struct OfdmaConfig *config, const char *names);

/**
 * Comma-separated list of `uniform`, `dpra`.
 */
enum OfdmaStatus ofdma_config_set_power_modes(struct OfdmaConfig *config, const char *names);

/**
 * Checks the configuration without running it.
 */
enum OfdmaStatus ofdma_config_validate(const struct OfdmaConfig *config);

/**
 * Runs the scenario; the caller owns `*out`.
 */
enum OfdmaStatus ofdma_run(const struct OfdmaConfig *config, struct OfdmaResults **out);

void ofdma_results_free(struct OfdmaResults *results);

/**
 * Number of rows, 0 for a null handle.
 */
size_t ofdma_results_len(const struct OfdmaResults *results);

enum OfdmaStatus ofdma_results_row(const struct OfdmaResults *results,
                                   size_t index,
                                   struct OfdmaRow *out);

/**
 * Writes the table as CSV, in the same format as the CLI.
 */
enum OfdmaStatus ofdma_results_write_csv(const struct OfdmaResults *results, const char *path);

/**
 * Worst-case MWDG approximation ratio for per-user cap `max_prbs`.
 */
enum OfdmaStatus ofdma_approximation_ratio(size_t max_prbs, size_t num_prbs, double *out);

/**
 * Power reduction that lowers a PRB's rate by `excess_rate` under fixed
 * interference.
 */
enum OfdmaStatus ofdma_delta_power(double rate,
                                   double excess_rate,
                                   double interference,
                                   double noise,
                                   double gain,
                                   double bandwidth,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OFDMA_ALLOC_H */
