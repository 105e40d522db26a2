#ifndef DECKWALKER_H
#define DECKWALKER_H

/* Generated by cbindgen from deckwalker-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Trace column selector for `dw_trace_column`; the order matches the CSV
// layout. `Touchdown` yields 0.0/1.0 flags.
typedef enum DwColumn {
  DW_COLUMN_T = 0,
  DW_COLUMN_X_POS = 1,
  DW_COLUMN_X_VEL = 2,
  DW_COLUMN_XD_POS = 3,
  DW_COLUMN_XD_VEL = 4,
  DW_COLUMN_XC_POS = 5,
  DW_COLUMN_XC_VEL = 6,
  DW_COLUMN_E_POS = 7,
  DW_COLUMN_E_VEL = 8,
  DW_COLUMN_EC_POS = 9,
  DW_COLUMN_EC_VEL = 10,
  DW_COLUMN_TAU_CMD = 11,
  DW_COLUMN_TAU_APPLIED = 12,
  DW_COLUMN_V = 13,
  DW_COLUMN_ZETA = 14,
  DW_COLUMN_EPSILON = 15,
  DW_COLUMN_THETA_NORM = 16,
  DW_COLUMN_P_EIG_MIN = 17,
  DW_COLUMN_P_EIG_MAX = 18,
  DW_COLUMN_STEP_U = 19,
  DW_COLUMN_SUPPORT_OFFSET = 20,
  DW_COLUMN_XS0C = 21,
  DW_COLUMN_TOUCHDOWN = 22,
} DwColumn;

// Status codes returned by every fallible call.
typedef enum DwStatus {
  DW_STATUS_OK = 0,
  // A required pointer argument was null.
  DW_STATUS_NULL_ARGUMENT = 1,
  // Scenario text could not be parsed or validated.
  DW_STATUS_SCENARIO = 2,
  // Run configuration was inconsistent.
  DW_STATUS_CONFIG = 3,
  // The simulation diverged; a partial trace is still returned.
  DW_STATUS_DIVERGED = 4,
  DW_STATUS_IO = 5,
  // An argument was out of range (unknown column, short buffer).
  DW_STATUS_RANGE = 6,
  // A string argument was not valid UTF-8.
  DW_STATUS_UTF8 = 7,
} DwStatus;

// Opaque scenario handle.
typedef struct DwScenario DwScenario;

// Opaque trace handle.
typedef struct DwTrace DwTrace;

// Per-run evaluation metrics over the fixed [5 s, 15 s] interval.
typedef struct DwMetrics {
  double rmse;
  double peak;
  double rmse_pi;
  double peak_pi;
  double trq;
  double fit_slope;
} DwMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on the calling thread. The pointer
// stays valid until the next failing call on the same thread.
const char *dw_last_error(void);

// Parse a scenario from TOML text.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum DwStatus dw_scenario_from_toml(const char *text, struct DwScenario **out);

// Builtin benchmark scenario from a case id ("case1".."case3") and a
// controller id ("pd_ff", "adaptive", "ankle_off").
//
// # Safety
// Both strings must be valid NUL-terminated strings; `out` must be valid.
enum DwStatus dw_scenario_builtin(const char *case_id,
                                  const char *controller,
                                  struct DwScenario **out);

// # Safety
// `scenario` must come from a `dw_scenario_*` constructor and not be freed twice.
void dw_scenario_free(struct DwScenario *scenario);

// Run a scenario. On `DW_STATUS_DIVERGED` the partial trace is still
// stored in `out` and must be freed.
//
// # Safety
// `scenario` must be a live handle; `out` must be a valid pointer.
enum DwStatus dw_run(const struct DwScenario *scenario, struct DwTrace **out);

// # Safety
// `trace` must come from `dw_run` and not be freed twice.
void dw_trace_free(struct DwTrace *trace);

// Number of uniformly sampled rows in the trace.
//
// # Safety
// `trace` must be a live handle.
size_t dw_trace_samples(const struct DwTrace *trace);

// Number of touchdown events recorded in the trace.
//
// # Safety
// `trace` must be a live handle.
size_t dw_trace_touchdowns(const struct DwTrace *trace);

// Evaluation metrics of a completed trace.
//
// # Safety
// `trace` must be a live handle; `out` must be a valid pointer.
enum DwStatus dw_trace_metrics(const struct DwTrace *trace, struct DwMetrics *out);

// Copy one signal column into `buf` (capacity `len` doubles). Returns the
// status; the trace length is available via `dw_trace_samples`.
//
// # Safety
// `trace` must be a live handle and `buf` must point to at least `len`
// writable doubles.
enum DwStatus dw_trace_column(const struct DwTrace *trace,
                              enum DwColumn column,
                              double *buf,
                              size_t len);

// Write the trace CSV to `path`.
//
// # Safety
// `trace` must be a live handle and `path` a valid NUL-terminated string.
enum DwStatus dw_trace_write_csv(const struct DwTrace *trace, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DECKWALKER_H */
