/* SPDX-License-Identifier: MIT
 * Copyright (c) 2026 selfgrav contributors
 *
 * C interface to the selfgrav library. Every call returns an sg_status; on
 * failure sg_last_error() holds a message for the calling thread. Strings
 * returned through char** are owned by the caller and released with
 * sg_string_free().
 */
#ifndef SELFGRAV_H
#define SELFGRAV_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SG_API __declspec(dllexport)
#else
#define SG_API __attribute__((visibility("default")))
#endif

/* Values double as CLI exit codes. */
typedef enum {
  SG_OK = 0,
  SG_ERR_CONFIG = 2,    /* bad configuration, parameter out of range */
  SG_ERR_NUMERICAL = 3, /* blowup, non-convergence */
  SG_ERR_CHECK = 4,     /* an acceptance criterion failed */
  SG_ERR_IO = 5,
  SG_ERR_ARGUMENT = 6,  /* null handle or pointer */
  SG_ERR_INTERNAL = 7
} sg_status;

typedef struct sg_config sg_config;
typedef struct sg_law sg_law;
typedef struct sg_run sg_run;

typedef struct {
  double P, dP, d2P, c, e, k, d, h;
} sg_law_values;

SG_API const char* sg_version(void);
SG_API const char* sg_last_error(void);
SG_API void sg_string_free(char* s);

/* Configuration: defaults, a JSON file, or JSON text; then dotted-key overrides. */
SG_API sg_status sg_config_new(sg_config** out);
SG_API sg_status sg_config_load(const char* path, sg_config** out);
SG_API sg_status sg_config_parse(const char* json_text, sg_config** out);
SG_API sg_status sg_config_set(sg_config* cfg, const char* key, const char* value);
SG_API sg_status sg_config_to_json(const sg_config* cfg, char** out);
SG_API sg_status sg_config_check_solver(const sg_config* cfg);
SG_API void sg_config_free(sg_config* cfg);

SG_API sg_status sg_law_new(const char* json_text, sg_law** out);
SG_API sg_status sg_law_from_config(const sg_config* cfg, sg_law** out);
SG_API sg_status sg_law_eval(const sg_law* law, double rho, sg_law_values* out);
SG_API void sg_law_free(sg_law* law);

/* Reports as JSON text. dump_csv may be NULL. */
SG_API sg_status sg_eos_report(const sg_config* cfg, char** json);
SG_API sg_status sg_critical_mass(const sg_config* cfg, char** json);
SG_API sg_status sg_entropy_special(const sg_config* cfg, char** json, char** dump_csv);
SG_API sg_status sg_entropy_kernel(const sg_config* cfg, char** json, char** dump_csv);

/* Solver run. A run that blew up still yields a handle; sg_run_status reports it. */
SG_API sg_status sg_run_new(const sg_config* cfg, sg_run** out);
SG_API sg_status sg_run_status(const sg_run* run);
SG_API sg_status sg_run_ledger_csv(const sg_run* run, char** csv);
SG_API int sg_run_snapshot_count(const sg_run* run);
SG_API sg_status sg_run_snapshot_csv(const sg_run* run, int index, char** csv);
SG_API sg_status sg_run_summary(const sg_run* run, char** json);
SG_API sg_status sg_run_write(const sg_run* run, const char* dir);
SG_API void sg_run_free(sg_run* run);

/* axis: "eps" or "b"; parameters from the config sweep section. */
SG_API sg_status sg_sweep(const sg_config* cfg, const char* axis, char** json);

/* criteria: comma-separated ids, NULL or "" for all. Returns SG_ERR_CHECK when any fails. */
SG_API sg_status sg_check(const char* criteria, int verbose, char** table, char** json);

/* Writes text to path, creating parent directories. */
SG_API sg_status sg_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* SELFGRAV_H */
