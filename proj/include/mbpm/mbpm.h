/* C interface to the mbpm library. All functions are thread-safe on distinct
 * handles; error messages are kept per thread. */
#ifndef MBPM_H
#define MBPM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MBPM_API __declspec(dllexport)
#else
#define MBPM_API __attribute__((visibility("default")))
#endif

typedef struct mbpm_model mbpm_model;
typedef struct mbpm_report mbpm_report;

typedef enum mbpm_status {
  MBPM_OK = 0,
  MBPM_E_SPEC = 1,          /* malformed model or configuration document */
  MBPM_E_DIMENSION = 2,
  MBPM_E_NOT_PRIMITIVE = 3,
  MBPM_E_CONVERGENCE = 4,
  MBPM_E_INFEASIBLE = 5,    /* suite or computation does not apply to the model */
  MBPM_E_NUMERIC = 6,
  MBPM_E_ARGUMENT = 7,
  MBPM_E_IO = 8,
  MBPM_E_INTERNAL = 9
} mbpm_status;

MBPM_API const char* mbpm_version(void);

/* Message of the last failed call on this thread ("" if none). */
MBPM_API const char* mbpm_last_error(void);

MBPM_API const char* mbpm_status_name(mbpm_status status);

MBPM_API mbpm_status mbpm_model_from_json(const char* json, mbpm_model** out);
MBPM_API mbpm_status mbpm_model_from_file(const char* path, mbpm_model** out);
MBPM_API void mbpm_model_free(mbpm_model* model);

MBPM_API size_t mbpm_model_dimension(const mbpm_model* model);

/* 16 hex digits plus terminator. */
MBPM_API mbpm_status mbpm_model_digest(const mbpm_model* model, char out[17]);

/* u and v receive p entries each; fails with MBPM_E_NOT_PRIMITIVE when the
 * mean matrix is not primitive. */
MBPM_API mbpm_status mbpm_model_perron(const mbpm_model* model, double* rho, double* u, double* v);

/* One-step moments at state z (p counts): h and cond_mean receive p entries,
 * cond_cov p*p entries row-major, sigma2 one value. Any output may be NULL. */
MBPM_API mbpm_status mbpm_model_moments(const mbpm_model* model, const int64_t* z, double* h, double* cond_mean,
                                        double* cond_cov, double* sigma2);

/* Writes Z_0..Z_n ((n+1)*p counts, row-major) of the path on stream
 * (seed, index). */
MBPM_API mbpm_status mbpm_simulate_path(const mbpm_model* model, size_t n, uint64_t seed, uint64_t index,
                                        int64_t* out);

/* Runs an experiment suite described by a JSON configuration document. */
MBPM_API mbpm_status mbpm_run_suite(const mbpm_model* model, const char* config_json, mbpm_report** out);

MBPM_API const char* mbpm_report_json(const mbpm_report* report);
MBPM_API int mbpm_report_passed(const mbpm_report* report);
MBPM_API size_t mbpm_report_artifact_count(const mbpm_report* report);
MBPM_API const char* mbpm_report_artifact_name(const mbpm_report* report, size_t i);
MBPM_API const char* mbpm_report_artifact_data(const mbpm_report* report, size_t i);
/* Writes report.json and the artifacts into dir. */
MBPM_API mbpm_status mbpm_report_write(const mbpm_report* report, const char* dir);
MBPM_API void mbpm_report_free(mbpm_report* report);

#ifdef __cplusplus
}
#endif

#endif
