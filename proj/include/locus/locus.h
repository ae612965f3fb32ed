#ifndef LOCUS_LOCUS_H
#define LOCUS_LOCUS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LOCUS_API __declspec(dllexport)
#else
#define LOCUS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum locus_status {
  LOCUS_OK = 0,
  LOCUS_ERR_INVALID_ARGUMENT = 1,
  LOCUS_ERR_DIMENSION_MISMATCH = 2,
  LOCUS_ERR_NON_FINITE = 3,
  LOCUS_ERR_IO = 4,
  LOCUS_ERR_PARSE = 5,
  LOCUS_ERR_NULL_POINTER = 6,
  LOCUS_ERR_INTERNAL = 7
} locus_status;

/* Opaque handles. Each is released with its matching *_free function;
   passing NULL to a free function is a no-op. */
typedef struct locus_instance locus_instance;         /* points + geometric graph */
typedef struct locus_measurements locus_measurements; /* noisy squared distances */
typedef struct locus_solution locus_solution;         /* Gram matrix + estimated points */

typedef struct locus_solver_options {
  double feas_tol;
  double obj_tol;
  double gap_tol;
  int max_iters;
  double penalty;
  int adaptive_penalty;
  double time_limit_seconds; /* 0 disables the limit */
} locus_solver_options;

typedef struct locus_solution_summary {
  int n;
  int dim;
  double objective;
  double dual_bound;
  double max_violation;
  double min_eigenvalue;
  int iterations;
  int converged;
  double runtime_seconds;
} locus_solution_summary;

/* Message for the last failed call on this thread ("" if none). */
LOCUS_API const char* locus_last_error(void);
LOCUS_API const char* locus_status_string(locus_status status);
LOCUS_API const char* locus_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
LOCUS_API void locus_string_free(char* s);

/* n uniform points in [-0.5, 0.5]^d and G(n, r). r <= 0 selects
   alpha (log n / n)^(1/d). */
LOCUS_API locus_status locus_instance_generate(int n, int d, double r, double alpha, uint64_t seed,
                                               locus_instance** out);
/* points: n*d doubles, row-major. edges: m pairs (i, j), or NULL with m = 0
   for the r-neighborhood graph. */
LOCUS_API locus_status locus_instance_from_points(const double* points, int n, int d, double r,
                                                  const int* edges, size_t m, locus_instance** out);
LOCUS_API locus_status locus_instance_load(const char* path, locus_instance** out);
LOCUS_API locus_status locus_instance_save(const locus_instance* inst, const char* path);
LOCUS_API locus_status locus_instance_info(const locus_instance* inst, int* n, int* d, double* r, size_t* edges,
                                           int* connected);
/* Copies n*d coordinates, row-major. */
LOCUS_API locus_status locus_instance_points(const locus_instance* inst, double* out);
LOCUS_API void locus_instance_free(locus_instance* inst);

/* model: exact, uniform, rssi, tdoa, bending, mixture. delta is the error
   budget (rssi/tdoa take eps and derive it); eps is eps for rssi/tdoa and
   the Gaussian fraction for mixture. */
LOCUS_API locus_status locus_noise(const locus_instance* inst, const char* model, double delta, double eps,
                                   uint64_t seed, locus_measurements** out);
LOCUS_API locus_status locus_measurements_load(const char* path, locus_measurements** out);
LOCUS_API locus_status locus_measurements_save(const locus_measurements* m, const char* path);
LOCUS_API locus_status locus_measurements_info(const locus_measurements* m, int* n, size_t* edges, double* delta);
/* Max and min over edges of measured - true squared distance. */
LOCUS_API locus_status locus_measurements_error_range(const locus_measurements* m, const locus_instance* truth,
                                                      double* min_error, double* max_error);
LOCUS_API void locus_measurements_free(locus_measurements* m);

LOCUS_API void locus_solver_options_default(locus_solver_options* opts);
/* opts may be NULL for defaults. */
LOCUS_API locus_status locus_solve(const locus_measurements* m, int d, const locus_solver_options* opts,
                                   locus_solution** out);
LOCUS_API locus_status locus_solution_summary_get(const locus_solution* sol, locus_solution_summary* out);
/* Copies n*d estimated coordinates, row-major. */
LOCUS_API locus_status locus_solution_points(const locus_solution* sol, double* out);
/* Copies the n*n Gram matrix. */
LOCUS_API locus_status locus_solution_gram(const locus_solution* sol, double* out);
LOCUS_API locus_status locus_solution_error_metric(const locus_solution* sol, const locus_instance* truth,
                                                   double* out);
/* truth may be NULL; when given, the metric is included. */
LOCUS_API locus_status locus_solution_save(const locus_solution* sol, const char* path, const locus_instance* truth,
                                           int include_gram);
LOCUS_API void locus_solution_free(locus_solution* sol);

/* mode: "full" or "reduced". */
LOCUS_API locus_status locus_rigidity_report(const locus_instance* inst, const char* mode, char** json_out);

typedef void (*locus_progress_fn)(const char* line, void* user);

/* Runs an experiment config (JSON text) and writes results.csv, summary.json
   and plot.svg into out_dir. threads > 0 and seeds > 0 override the config
   (seeds = N uses seeds 0..N-1). progress may be NULL. */
LOCUS_API locus_status locus_sweep_run(const char* config_json, const char* out_dir, int threads, int seeds,
                                       locus_progress_fn progress, void* user, char** summary_out);

#ifdef __cplusplus
}
#endif

#endif
