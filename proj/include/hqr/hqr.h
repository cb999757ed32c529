#ifndef HQR_H
#define HQR_H

/* C interface to the hqr library. Every handle is opaque and owned by the
   caller; every fallible call returns an hqr_status and leaves details in
   a thread-local message readable through hqr_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HQR_BUILDING_LIBRARY)
#    define HQR_API __declspec(dllexport)
#  else
#    define HQR_API __declspec(dllimport)
#  endif
#else
#  define HQR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hqr_status {
  HQR_OK = 0,
  HQR_E_VERIFY = 1,
  HQR_E_CONFIG = 2,
  HQR_E_IO = 3,
  HQR_E_NOT_CONVERGED = 4,
  HQR_E_NUMERICAL = 5,
  HQR_E_DOMAIN = 6,
  HQR_E_DIMENSION = 7,
  HQR_E_FORMAT = 8,
  HQR_E_PRECONDITION = 9,
  HQR_E_ARGUMENT = 10,
  HQR_E_INTERNAL = 11
} hqr_status;

HQR_API const char* hqr_version(void);
HQR_API const char* hqr_status_name(hqr_status status);
/* Message of the last failing call on this thread; "" if none. */
HQR_API const char* hqr_last_error(void);
/* Process exit code for a status: 0, 1, 2 (config, domain, dimension,
   argument), 3 (io, format), 4, or 5 (numerical, precondition, internal). */
HQR_API int hqr_exit_code(hqr_status status);

/* ---- Potentials ------------------------------------------------------- */

typedef struct hqr_potential hqr_potential;

typedef enum hqr_potential_fn {
  HQR_FN_PSI = 0,         /* psi(t) */
  HQR_FN_V = 1,           /* V(y) */
  HQR_FN_V_GRAD = 2,      /* V'(y) */
  HQR_FN_V_CONJ = 3,      /* V*(sigma) */
  HQR_FN_V_CONJ_GRAD = 4, /* (V*)'(sigma) */
  HQR_FN_WEIGHT = 5       /* psi'(t) / (2t) */
} hqr_potential_fn;

/* id: "exp", "geman-mcclure", "log", "sine". log_epsilon <= 0 selects 1e-8. */
HQR_API hqr_status hqr_potential_create(const char* id, double log_epsilon, hqr_potential** out);
HQR_API void hqr_potential_destroy(hqr_potential* p);
HQR_API hqr_status hqr_potential_eval(const hqr_potential* p, hqr_potential_fn fn, double arg,
                                      double* out);
HQR_API hqr_status hqr_potential_zero_limit(const hqr_potential* p, double* out);
HQR_API hqr_status hqr_potential_sigma_domain(const hqr_potential* p, double* lo, double* hi,
                                              int* lo_closed, int* hi_closed);
/* Bit i of *failed is set when assumption clause i fails, in the order
   nonnegative, zero_at_origin, symmetric, c1, derivative_nonnegative,
   weight_decreasing, weight_vanishes, zero_limit_finite. */
HQR_API hqr_status hqr_potential_check_assumptions(const hqr_potential* p, const double* t_grid,
                                                   size_t len, uint32_t* failed);
/* Infimum of y sigma - V(y) over a grid on [0, y_max] refined locally. */
HQR_API hqr_status hqr_conjugate_by_grid(const hqr_potential* p, double sigma, double y_max,
                                         size_t steps, double* out);

/* ---- Linear operators ------------------------------------------------- */

typedef struct hqr_operator hqr_operator;
typedef struct hqr_operator_set hqr_operator_set;

HQR_API hqr_status hqr_operator_identity(size_t n, hqr_operator** out);
HQR_API hqr_status hqr_operator_dense(size_t rows, size_t cols, const double* row_major,
                                      hqr_operator** out);
/* Odd-length kernel summing to 1, replicated borders, h x w grid. */
HQR_API hqr_status hqr_operator_blur(const double* kernel, size_t len, size_t h, size_t w,
                                     hqr_operator** out);
HQR_API void hqr_operator_destroy(hqr_operator* op);
HQR_API size_t hqr_operator_in_dim(const hqr_operator* op);
HQR_API size_t hqr_operator_out_dim(const hqr_operator* op);
HQR_API hqr_status hqr_operator_apply(const hqr_operator* op, const double* x, size_t x_len,
                                      double* y, size_t y_len);
HQR_API hqr_status hqr_operator_apply_adjoint(const hqr_operator* op, const double* y,
                                              size_t y_len, double* x, size_t x_len);

HQR_API hqr_status hqr_operator_set_create(hqr_operator_set** out);
/* n - 1 first differences of a length-n signal. */
HQR_API hqr_status hqr_operator_set_diff1d(size_t n, hqr_operator_set** out);
/* One 2-row forward-difference operator per pixel of an h x w image. */
HQR_API hqr_status hqr_operator_set_grad2d(size_t h, size_t w, hqr_operator_set** out);
/* Appends a copy of op. */
HQR_API hqr_status hqr_operator_set_push(hqr_operator_set* set, const hqr_operator* op);
HQR_API size_t hqr_operator_set_size(const hqr_operator_set* set);
HQR_API void hqr_operator_set_destroy(hqr_operator_set* set);

/* ---- Problems --------------------------------------------------------- */

typedef struct hqr_problem hqr_problem;

typedef struct hqr_stationarity {
  double grad_f_inf;
  double grad_x_inf;
  double grad_sigma_inf;
  double value_gap;
  double f;
  double L;
  int correspondence_ok;
} hqr_stationarity;

/* Copies everything it is given. */
HQR_API hqr_status hqr_problem_create(const hqr_potential* p, double beta, const hqr_operator* a,
                                      const double* b, size_t b_len,
                                      const hqr_operator_set* regularizers, hqr_problem** out);
HQR_API void hqr_problem_destroy(hqr_problem* prob);
HQR_API size_t hqr_problem_n(const hqr_problem* prob);
HQR_API size_t hqr_problem_m(const hqr_problem* prob);
HQR_API hqr_status hqr_problem_f(const hqr_problem* prob, const double* x, size_t n, double* out);
HQR_API hqr_status hqr_problem_augmented(const hqr_problem* prob, const double* x, size_t n,
                                         const double* sigma, size_t m, double* out);
HQR_API hqr_status hqr_problem_sigma_update(const hqr_problem* prob, const double* x, size_t n,
                                            double* sigma, size_t m);
HQR_API hqr_status hqr_problem_f_grad(const hqr_problem* prob, const double* x, size_t n,
                                      double* grad);
HQR_API hqr_status hqr_problem_augmented_grad(const hqr_problem* prob, const double* x, size_t n,
                                              const double* sigma, size_t m, double* grad_x,
                                              double* grad_sigma);
HQR_API hqr_status hqr_problem_stationarity(const hqr_problem* prob, const double* x, size_t n,
                                            const double* sigma, size_t m, double tol,
                                            hqr_stationarity* out);

typedef struct hqr_hessian_report {
  double min_eig_f;
  double min_eig_L;
  int psd_f;
  int psd_L;
  int vgrad_hessian_nonsingular;
  int equivalence_checked;
  int equivalence_ok;
} hqr_hessian_report;

/* Requires a stationary pair and n + m <= 64. */
HQR_API hqr_status hqr_hessian_check(const hqr_problem* prob, const double* x, size_t n,
                                     const double* sigma, size_t m, double tol,
                                     hqr_hessian_report* out);

/* ---- Solver ----------------------------------------------------------- */

typedef struct hqr_solver_config hqr_solver_config;
typedef struct hqr_solution hqr_solution;

typedef enum hqr_init_mode {
  HQR_INIT_AUTO = 0,
  HQR_INIT_OBSERVATION = 1,
  HQR_INIT_ADJOINT = 2,
  HQR_INIT_ZERO = 3,
  HQR_INIT_GIVEN = 4
} hqr_init_mode;

typedef struct hqr_trace_row {
  size_t iter;
  double f;
  double L;
  double grad_inf;
  double dx;
  size_t cg_iters;
  double L_after_sigma;
} hqr_trace_row;

HQR_API hqr_status hqr_solver_config_create(hqr_solver_config** out);
HQR_API void hqr_solver_config_destroy(hqr_solver_config* cfg);
HQR_API hqr_status hqr_solver_config_set_max_iters(hqr_solver_config* cfg, size_t v);
HQR_API hqr_status hqr_solver_config_set_tol_obj(hqr_solver_config* cfg, double v);
HQR_API hqr_status hqr_solver_config_set_tol_x(hqr_solver_config* cfg, double v);
HQR_API hqr_status hqr_solver_config_set_cg_tol(hqr_solver_config* cfg, double v);
/* 0 selects 10 n. */
HQR_API hqr_status hqr_solver_config_set_cg_max_iters(hqr_solver_config* cfg, size_t v);
HQR_API hqr_status hqr_solver_config_set_mu(hqr_solver_config* cfg, double v);
/* x0 is read only for HQR_INIT_GIVEN. */
HQR_API hqr_status hqr_solver_config_set_init(hqr_solver_config* cfg, hqr_init_mode mode,
                                              const double* x0, size_t n);

/* On HQR_E_NOT_CONVERGED *out still receives the last iterate when one
   exists; otherwise *out is NULL. */
HQR_API hqr_status hqr_solve(const hqr_problem* prob, const hqr_solver_config* cfg,
                             hqr_solution** out);
HQR_API void hqr_solution_destroy(hqr_solution* sol);
HQR_API int hqr_solution_converged(const hqr_solution* sol);
HQR_API const double* hqr_solution_x(const hqr_solution* sol, size_t* n);
HQR_API const double* hqr_solution_sigma(const hqr_solution* sol, size_t* m);
HQR_API size_t hqr_solution_trace_length(const hqr_solution* sol);
HQR_API hqr_status hqr_solution_trace_row(const hqr_solution* sol, size_t k, hqr_trace_row* out);

/* ---- File-driven runs ------------------------------------------------- */

typedef struct hqr_run_config hqr_run_config;

typedef enum hqr_command { HQR_CMD_DENOISE = 0, HQR_CMD_DEBLUR = 1 } hqr_command;

typedef struct hqr_run_summary {
  int exit_code;
  int converged;
  size_t outer_iters;
  double mse_vs_input;
  double psnr_vs_input;
  int has_clean;
  double mse_vs_clean;
  double psnr_vs_clean;
  double mse_observation_vs_clean;
  double psnr_observation_vs_clean;
} hqr_run_summary;

HQR_API hqr_status hqr_run_config_create(hqr_run_config** out);
HQR_API void hqr_run_config_destroy(hqr_run_config* cfg);
/* Keys as in the config file; '-' and '_' are interchangeable. */
HQR_API hqr_status hqr_run_config_set(hqr_run_config* cfg, const char* key, const char* value);
HQR_API hqr_status hqr_run_config_load(hqr_run_config* cfg, const char* path);
/* Returns HQR_E_NOT_CONVERGED (with outputs written and *out filled) when
   the iteration budget ran out. */
HQR_API hqr_status hqr_run(const hqr_run_config* cfg, hqr_command cmd, hqr_run_summary* out);

/* ---- Property suites -------------------------------------------------- */

typedef void (*hqr_line_sink)(const char* line, void* user);

/* suite: "fenchel", "stationarity", "hessian", "conjugate", "assumptions",
   "all". Report lines go to sink; returns HQR_E_VERIFY if any property
   fails. */
HQR_API hqr_status hqr_verify(const char* suite, uint64_t seed, hqr_line_sink sink, void* user);

#ifdef __cplusplus
}
#endif

#endif /* HQR_H */
