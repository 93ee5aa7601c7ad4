#ifndef CLEVO_CLEVO_H
#define CLEVO_CLEVO_H

/* C interface to the constrained-evolution library.
 *
 * Every fallible call returns a clevo_status; on failure the message is
 * available from clevo_last_error() on the calling thread until the next
 * call into the library. Handles are opaque and owned by the caller. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CLEVO_BUILDING_LIBRARY)
#    define CLEVO_API __declspec(dllexport)
#  else
#    define CLEVO_API __declspec(dllimport)
#  endif
#else
#  define CLEVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clevo_status {
  CLEVO_OK = 0,
  CLEVO_ERR_INVALID_ARGUMENT = 1,
  CLEVO_ERR_NUMERIC_DOMAIN = 2,
  CLEVO_ERR_INTEGRATION = 3,
  CLEVO_ERR_TRUNCATION = 4,
  CLEVO_ERR_DEGENERATE_STATE = 5,
  CLEVO_ERR_FLOW_CONSISTENCY = 6,
  CLEVO_ERR_SIZE_GUARD = 7,
  CLEVO_ERR_IO = 8,
  CLEVO_ERR_DOMAIN = 9,
  CLEVO_ERR_INTERNAL = 100
} clevo_status;

CLEVO_API const char* clevo_version(void);
CLEVO_API const char* clevo_last_error(void);
CLEVO_API const char* clevo_status_name(clevo_status status);

/* n < 1 restores the runtime default. */
CLEVO_API void clevo_set_num_threads(int n);
CLEVO_API int clevo_num_threads(void);

/* ---- numeric tables ---------------------------------------------------- */

typedef struct clevo_table clevo_table;

CLEVO_API size_t clevo_table_rows(const clevo_table* table);
CLEVO_API size_t clevo_table_columns(const clevo_table* table);
CLEVO_API const char* clevo_table_column_name(const clevo_table* table, size_t column);
CLEVO_API clevo_status clevo_table_get(const clevo_table* table, size_t row, size_t column, double* value);
CLEVO_API clevo_status clevo_table_write_csv(const clevo_table* table, const char* path);
CLEVO_API void clevo_table_destroy(clevo_table* table);

/* ---- phase-space grids --------------------------------------------------
 * Axes are Re(alpha) and Im(alpha); values are row-major in (x, p). */

typedef struct clevo_grid_geometry {
  double x_min, x_max;
  double p_min, p_max;
  size_t nx, np;
} clevo_grid_geometry;

typedef struct clevo_grid clevo_grid;

/* [-6, 6]^2 with 301 x 301 points. */
CLEVO_API void clevo_grid_geometry_default(clevo_grid_geometry* geometry);
CLEVO_API clevo_status clevo_grid_geometry_get(const clevo_grid* grid, clevo_grid_geometry* geometry);
CLEVO_API clevo_status clevo_grid_value(const clevo_grid* grid, size_t i, size_t j, double* value);
CLEVO_API double clevo_grid_min(const clevo_grid* grid);
CLEVO_API double clevo_grid_max(const clevo_grid* grid);
CLEVO_API double clevo_grid_integral(const clevo_grid* grid);
CLEVO_API size_t clevo_grid_warning_count(const clevo_grid* grid);
CLEVO_API const char* clevo_grid_warning(const clevo_grid* grid, size_t index);
CLEVO_API clevo_status clevo_grid_write_csv(const clevo_grid* grid, const char* path);
CLEVO_API clevo_status clevo_grid_write_json(const clevo_grid* grid, const char* path);
CLEVO_API void clevo_grid_destroy(clevo_grid* grid);

/* ---- Kerr medium ------------------------------------------------------- */

typedef enum clevo_kerr_mode {
  CLEVO_KERR_CC = 0, /* coherent state, classical flow */
  CLEVO_KERR_QC = 1, /* cat state, classical flow */
  CLEVO_KERR_CQ = 2, /* coherent state, quantum evolution */
  CLEVO_KERR_QQ = 3  /* cat state, quantum evolution */
} clevo_kerr_mode;

typedef struct clevo_kerr_config {
  double alpha0_re, alpha0_im; /* coherent amplitude; the cat is |a e^{-i pi/4}> - |a e^{i pi/4}>, a = |alpha0| */
  double omega, kappa;
  double time;
  size_t cutoff;
  size_t trajectory_samples;
  int co_rotating;
} clevo_kerr_config;

/* alpha0 = 3, omega = 1, kappa = 0.1, time = pi / kappa, cutoff 60, 256 samples, co-rotating. */
CLEVO_API void clevo_kerr_config_default(clevo_kerr_config* config);

/* Wigner grid of the panel plus its mean trajectory (t, re_mean, im_mean). */
CLEVO_API clevo_status clevo_kerr_render(const clevo_kerr_config* config, clevo_kerr_mode mode,
                                         const clevo_grid_geometry* geometry, clevo_grid** grid,
                                         clevo_table** trajectory);

CLEVO_API clevo_status clevo_kerr_classical_flow(double re, double im, double omega, double kappa, double t,
                                                 double* out_re, double* out_im);
CLEVO_API clevo_status clevo_kerr_quantum_mean(double re, double im, double omega, double kappa, double t,
                                               double* out_re, double* out_im);

/* ---- Jaynes-Cummings --------------------------------------------------- */

typedef enum clevo_jc_solver {
  CLEVO_JC_NUMERIC = 0,  /* integrated semi-classical equations */
  CLEVO_JC_ANALYTIC = 1, /* closed-form semi-classical solution */
  CLEVO_JC_QUANTUM = 2   /* exact entangled solution */
} clevo_jc_solver;

/* Semi-classical columns: t, kappa_t, re_alpha, im_alpha, re_g, im_g, re_e, im_e, atom_norm, excitation.
 * Quantum columns: t, kappa_t, re_alpha, im_alpha, p_g, p_e, excitation, entropy, residual. */
CLEVO_API clevo_status clevo_jc_trajectory(double omega, double kappa, const double* times, size_t n,
                                           clevo_jc_solver solver, clevo_table** out);

typedef struct clevo_jc_comparison {
  double max_deviation;   /* max over samples and components, numeric vs closed form */
  double energy_drift;    /* relative */
  double norm_drift;      /* atom norm */
  double excitation_drift;
} clevo_jc_comparison;

CLEVO_API clevo_status clevo_jc_compare(double omega, double kappa, const double* times, size_t n,
                                        clevo_jc_comparison* out);
CLEVO_API clevo_status clevo_jc_entropy(double omega, double kappa, double t, double* entropy);
CLEVO_API clevo_status clevo_jacobi_theta(double x, double* theta);
CLEVO_API double clevo_theta_quarter_period(void);

/* ---- separable ensembles (natural units) -------------------------------- */

/* Writes up to capacity divisors of n in ascending order; *count receives the total. */
CLEVO_API clevo_status clevo_ensemble_valid_k(size_t n, size_t* out, size_t capacity, size_t* count);

/* rows: tau, K, ratio. curves: K, r_K, max_ratio, tau_at_max, half_period. */
CLEVO_API clevo_status clevo_ensemble_sweep(size_t n, const size_t* k_list, size_t k_count, double r, double beta,
                                            const double* tau, size_t tau_count, clevo_table** rows,
                                            clevo_table** curves);

CLEVO_API clevo_status clevo_ensemble_variance(size_t n, size_t k, double r, double beta, double tau,
                                               double* variance);

/* Max elementwise deviation between structured propagation of the thermal
 * state and the dense covariance integration (N <= 256). */
CLEVO_API clevo_status clevo_ensemble_oracle_deviation(size_t n, size_t k, double r, double beta, const double* tau,
                                                       size_t tau_count, double* max_deviation);

/* ---- generic constrained-evolution engine ------------------------------- */

typedef enum clevo_engine_model {
  CLEVO_ENGINE_HARMONIC = 0,   /* H = omega |alpha|^2 */
  CLEVO_ENGINE_KERR = 1,       /* H = omega |alpha|^2 + kappa/2 |alpha|^4 */
  CLEVO_ENGINE_JC = 2,         /* semi-classical JC from alpha = 0, phi = (1, 1)/sqrt 2 */
  CLEVO_ENGINE_SCHRODINGER = 3 /* random Hermitian matrix of size dim, seeded */
} clevo_engine_model;

typedef struct clevo_engine_config {
  clevo_engine_model model;
  double omega, kappa;
  double alpha_re, alpha_im;
  size_t dim;
  unsigned long long seed;
  int finite_difference; /* 1: ignore analytic gradients */
} clevo_engine_config;

CLEVO_API void clevo_engine_config_default(clevo_engine_config* config);

typedef struct clevo_engine_report {
  double energy_drift;
  double norm_drift;
  double max_reference_deviation; /* against the model's closed form */
  size_t accepted_steps;
  size_t rejected_steps;
} clevo_engine_report;

/* Columns: t, energy, then re_z<k>, im_z<k> per parameter component. */
CLEVO_API clevo_status clevo_engine_run(const clevo_engine_config* config, const double* times, size_t n,
                                        clevo_table** out, clevo_engine_report* report);

#ifdef __cplusplus
}
#endif

#endif /* CLEVO_CLEVO_H */
