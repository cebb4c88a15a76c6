#ifndef ADMMASS_ADMMASS_H
#define ADMMASS_ADMMASS_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADMMASS_BUILDING_LIBRARY)
#define ADM_API __attribute__((visibility("default")))
#else
#define ADM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adm_status {
  ADM_OK = 0,
  ADM_E_INVALID_ARGUMENT = 1,
  ADM_E_DOMAIN = 2,
  ADM_E_NUMERICAL = 3,
  ADM_E_IO = 4,
  ADM_E_INTERNAL = 5
} adm_status;

/* Outcome of a completed run, mirrored by the CLI exit codes. */
typedef enum adm_outcome {
  ADM_OUTCOME_OK = 0,
  ADM_OUTCOME_NO_CONVERGENCE = 2,
  ADM_OUTCOME_THRESHOLD_BREACH = 3
} adm_outcome;

typedef struct adm_metric adm_metric;

ADM_API const char* adm_version(void);

/* Message of the last failed call on this thread; empty after a success. */
ADM_API const char* adm_last_error(void);

ADM_API adm_status adm_set_workers(int workers);

/* Metric from a JSON object in the "metric" section grammar of the config,
   e.g. {"family": "schwarzschild", "n": 3, "m": 1}. Missing keys take
   their defaults. */
ADM_API adm_status adm_metric_create(const char* spec_json, adm_metric** out);
ADM_API void adm_metric_free(adm_metric* metric);
ADM_API int adm_metric_dim(const adm_metric* metric);
/* Copies the NUL-terminated id into buf when it fits; *needed gets the size
   including the terminator. */
ADM_API adm_status adm_metric_id(const adm_metric* metric, char* buf, size_t size, size_t* needed);

/* g at x, written row-major into g_out (n * n doubles). */
ADM_API adm_status adm_metric_eval(const adm_metric* metric, const double* x, double* g_out);
ADM_API adm_status adm_scalar_curvature(const adm_metric* metric, const double* x, double* scal_out);

/* One mass method ("adm_surface", "weak", "ricci_surface", "ricci_weak",
   "plateau_identity" or the short forms) on a schedule with the default
   quadrature. Writes the extrapolated limit and its standard error. */
ADM_API adm_status adm_mass(const adm_metric* metric, const char* method, const char* cutoff, const double* scales,
                            size_t count, double* limit_out, double* stderr_out);

/* Runs a CLI command ("mass", "validate", "invariance", "convergence",
   "norms") on a JSON config. *report_json and *report_csv receive strings
   owned by the caller (release with adm_string_free); either pointer may be
   NULL when the output is not wanted. */
ADM_API adm_status adm_run(const char* command, const char* config_json, char** report_json, char** report_csv,
                           adm_outcome* outcome);

/* The full default config as JSON. */
ADM_API adm_status adm_default_config(char** config_json);

ADM_API void adm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
