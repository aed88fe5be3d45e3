#ifndef BFEQUIV_H
#define BFEQUIV_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(BFE_BUILDING_LIBRARY)
#    define BFE_API __declspec(dllexport)
#  else
#    define BFE_API __declspec(dllimport)
#  endif
#else
#  define BFE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bfe_config bfe_config;
typedef struct bfe_problem bfe_problem;
typedef struct bfe_dist bfe_dist;

typedef enum bfe_status {
  BFE_OK = 0,
  BFE_ERR_PARAMETER_DOMAIN,
  BFE_ERR_DOMAIN,
  BFE_ERR_NO_SOLUTION,
  BFE_ERR_NON_CONVERGENCE,
  BFE_ERR_DEGENERATE,
  BFE_ERR_RANK_DEFICIENT,
  BFE_ERR_CLASS_VIOLATION,
  BFE_ERR_INFEASIBLE,
  BFE_ERR_NUMERICAL_INTEGRITY,
  BFE_ERR_UNSUPPORTED,
  BFE_ERR_CONFIG,
  BFE_ERR_IO,
  BFE_ERR_INVALID_ARGUMENT,
  BFE_ERR_INTERNAL
} bfe_status;

BFE_API const char* bfe_version(void);
BFE_API const char* bfe_status_name(bfe_status status);
/* Message of the most recent failure on the calling thread; "" if none. */
BFE_API const char* bfe_last_error(void);

BFE_API bfe_status bfe_config_parse_file(const char* path, bfe_config** out);
BFE_API bfe_status bfe_config_parse_string(const char* text, bfe_config** out);
BFE_API bfe_status bfe_config_set(bfe_config* cfg, const char* key, const char* value);
BFE_API void bfe_config_free(bfe_config* cfg);

BFE_API bfe_status bfe_problem_create(const bfe_config* cfg, bfe_problem** out);
BFE_API void bfe_problem_free(bfe_problem* problem);
/* log B at a value of the classical statistic. */
BFE_API bfe_status bfe_problem_log_bf_at(const bfe_problem* problem, double statistic, double* log_bf);
/* Classical region of size alpha and the matching Bayes threshold. For upper-tail
   problems gamma1 == gamma2. */
BFE_API bfe_status bfe_problem_calibrate_alpha(const bfe_problem* problem, double alpha, double* gamma1,
                                               double* gamma2, double* lambda);
/* Region {B > lambda} and its null probability. */
BFE_API bfe_status bfe_problem_implied_alpha(const bfe_problem* problem, double lambda, double* gamma1,
                                             double* gamma2, double* alpha);

/* family: normal, gamma, chi_square, student_t, fisher_f, noncentral_f,
   noncentral_chi_square. The variate is multiplied by scale. */
BFE_API bfe_status bfe_dist_create(const char* family, const double* params, size_t nparams, double scale,
                                   bfe_dist** out);
BFE_API bfe_status bfe_dist_pdf(const bfe_dist* dist, double x, double* out);
BFE_API bfe_status bfe_dist_cdf(const bfe_dist* dist, double x, double* out);
BFE_API bfe_status bfe_dist_sf(const bfe_dist* dist, double x, double* out);
BFE_API bfe_status bfe_dist_quantile(const bfe_dist* dist, double p, double* out);
BFE_API void bfe_dist_free(bfe_dist* dist);

/* Runs a subcommand (calibrate, power, verify, dominance, johnson, props,
   reproduce-sec6). cfg may be NULL for reproduce-sec6. A NULL or empty out_dir
   selects run.output_dir from the config, else ./bfequiv_out. *exit_code receives the
   process exit status; *summary (optional) a heap string for bfe_string_free.
   Returns BFE_OK whenever the command ran, whatever its exit code. */
BFE_API bfe_status bfe_run_command(const char* command, const bfe_config* cfg, const char* out_dir, int* exit_code,
                                   char** summary);
BFE_API void bfe_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
