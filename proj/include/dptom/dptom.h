#ifndef DPTOM_H
#define DPTOM_H

/* Public C API of the dptom shared library.
 *
 * Conventions:
 *  - every function except the pure queries returns a dptom_status;
 *  - DPTOM_OK is 0; on failure dptom_last_error() carries a detailed,
 *    thread-local message naming the failing kernel and its inputs;
 *  - 4x4 matrices are passed as double[16], row-major;
 *  - heavy results (tables, phase maps) are opaque handles with explicit
 *    destroy functions; plain results are POD structs filled by the callee.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define DPTOM_API __declspec(dllexport)
#else
#  define DPTOM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dptom_status {
    DPTOM_OK = 0,
    DPTOM_ERR_INVALID_ARGUMENT = 1,
    DPTOM_ERR_UNPHYSICAL_BRANCH = 2,
    DPTOM_ERR_UNSTABLE_DRIFT = 3,
    DPTOM_ERR_SINGULAR = 4,
    DPTOM_ERR_NUMERICS = 5,
    DPTOM_ERR_NOT_FOUND = 6,
    DPTOM_ERR_BUFFER_TOO_SMALL = 7,
} dptom_status;

DPTOM_API const char* dptom_version(void);
DPTOM_API const char* dptom_status_name(dptom_status s);
/* Detail message for the last failure on this thread ("" when none). */
DPTOM_API const char* dptom_last_error(void);

/* ------------------------------------------------------------------ */
/* Parameters                                                          */
/* ------------------------------------------------------------------ */

typedef struct dptom_params {
    double kappa;
    double gamma_m;
    double omega_m;
    double delta;   /* bare detuning */
    double e_tilde; /* rescaled drive */
    double dtilde;  /* effective detuning */
    double g_eff;   /* effective coupling */
} dptom_params;

typedef struct dptom_tolerances {
    double eps_stab; /* strict-stability threshold, units of omega_m */
    double eps_band; /* marginality band on |Re lambda_1| */
} dptom_tolerances;

DPTOM_API void dptom_tolerances_default(dptom_tolerances* out);

DPTOM_API dptom_status dptom_params_from_effective(double dtilde, double g_eff, double kappa,
                                                   double gamma_m, double omega_m,
                                                   dptom_params* out);
DPTOM_API dptom_status dptom_params_from_bare(double delta, double e_tilde, double kappa,
                                              double gamma_m, double omega_m,
                                              dptom_params* out);

/* ------------------------------------------------------------------ */
/* Branches and stability                                              */
/* ------------------------------------------------------------------ */

typedef struct dptom_branch {
    int index;    /* 1, 2 or 3 */
    int physical; /* 0/1 */
    double n_tilde;
    double alpha_re, alpha_im;
    double beta_re, beta_im;
} dptom_branch;

DPTOM_API dptom_status dptom_branches(const dptom_params* p, dptom_branch out[3]);

typedef enum dptom_stability_class {
    DPTOM_STABLE = 0,
    DPTOM_SOFT_UNSTABLE = 1,
    DPTOM_HARD_UNSTABLE = 2,
    DPTOM_BOTH_UNSTABLE = 3,
    DPTOM_MARGINAL = 4,
    DPTOM_UNPHYSICAL = 5,
} dptom_stability_class;

DPTOM_API const char* dptom_stability_class_name(dptom_stability_class c);

typedef struct dptom_stability {
    int branch_index;
    int cls; /* dptom_stability_class */
    double hard_margin, soft_margin;
    double eig_re[4], eig_im[4]; /* sorted: |Re| asc, |Im| asc, Im asc */
    double gap_real, gap_imag;
    int margins_consistent;
} dptom_stability;

DPTOM_API dptom_status dptom_stability_report(const dptom_params* p, int branch_index,
                                              const dptom_tolerances* tol /* nullable */,
                                              dptom_stability* out);
DPTOM_API dptom_status dptom_drift_matrix(const dptom_params* p, int branch_index,
                                          double out[16]);

typedef struct dptom_region {
    int branch_class[3]; /* dptom_stability_class per branch */
    int physical[3];
    unsigned stable_mask;  /* bit j-1 set when branch j is stable */
    char label[12];        /* "A".."G", "boundary", "unknown" */
    int consistent;
} dptom_region;

DPTOM_API dptom_status dptom_classify(double dtilde, double g_eff, double kappa, double gamma_m,
                                      double omega_m, const dptom_tolerances* tol,
                                      dptom_region* out);

/* ------------------------------------------------------------------ */
/* Gaussian steady state                                               */
/* ------------------------------------------------------------------ */

typedef struct dptom_gaussian {
    double mean[4];
    double cov[16];
    double lyapunov_residual;
} dptom_gaussian;

DPTOM_API dptom_status dptom_steady_covariance(const dptom_params* p, int branch_index,
                                               const dptom_tolerances* tol,
                                               dptom_gaussian* out);

typedef struct dptom_entanglement {
    double sigma;
    double eta_minus;
    double log_neg;
    int entangled;
} dptom_entanglement;

DPTOM_API dptom_status dptom_log_negativity(const double cov[16], dptom_entanglement* out);

typedef struct dptom_squeezing {
    double min_eigenvalue;
    double min_diagonal;
    int squeezed_hybrid;
    int squeezed_local;
} dptom_squeezing;

DPTOM_API dptom_status dptom_squeezing_report(const double cov[16], dptom_squeezing* out);
DPTOM_API dptom_status dptom_photon_fluctuations(const double cov[16], double* out);
DPTOM_API dptom_status dptom_wigner_density(const dptom_gaussian* state, const double x[4],
                                            double* out);
DPTOM_API dptom_status dptom_symplectic_eigenvalues(const double cov[16], double out[2]);

/* ------------------------------------------------------------------ */
/* Tables: generic numeric results with named columns                  */
/* ------------------------------------------------------------------ */

typedef struct dptom_table dptom_table; /* opaque */

DPTOM_API size_t dptom_table_rows(const dptom_table* t);
DPTOM_API size_t dptom_table_cols(const dptom_table* t);
DPTOM_API const char* dptom_table_column_name(const dptom_table* t, size_t col);
DPTOM_API double dptom_table_get(const dptom_table* t, size_t row, size_t col);
DPTOM_API void dptom_table_destroy(dptom_table* t);

/* Mean-field trajectory. Columns: t, alpha_re, alpha_im, beta_re, beta_im, n. */
DPTOM_API dptom_status dptom_evolve_semiclassical(const dptom_params* p, double alpha_re,
                                                  double alpha_im, double beta_re,
                                                  double beta_im, double t_end, double tol,
                                                  int n_samples, dptom_table** out);

/* First/second-moment trajectory for a branch. Columns: t, x1..x4, v11, v12,
 * v13, v14, v22, v23, v24, v33, v34, v44. v0 = NULL starts from vacuum I/2. */
DPTOM_API dptom_status dptom_evolve_moments(const dptom_params* p, int branch_index,
                                            const double x0[4], const double v0[16],
                                            double t_end, double tol, int n_samples,
                                            dptom_table** out);

/* Quasi-static drive ramp at fixed bare detuning. Columns: e_tilde, n_up,
 * n_down, converged_up, converged_down. */
DPTOM_API dptom_status dptom_hysteresis(const dptom_params* base, double e_lo, double e_hi,
                                        int n_points, double dwell_rel_change,
                                        double max_periods, dptom_table** out);

/* Drift eigenvalues against G at fixed dtilde (branch 0 = all three).
 * Columns: g, branch, physical, re1, im1, re2, im2, re3, im3, re4, im4. */
DPTOM_API dptom_status dptom_spectrum_sweep(double dtilde, double g_lo, double g_hi,
                                            int n_points, int branch_index, double kappa,
                                            double gamma_m, double omega_m,
                                            dptom_table** out);

/* ------------------------------------------------------------------ */
/* Phase diagram                                                       */
/* ------------------------------------------------------------------ */

typedef struct dptom_phasemap dptom_phasemap; /* opaque */

enum {
    DPTOM_MEASURE_NONE = 0,
    DPTOM_MEASURE_ENTANGLEMENT = 1,
    DPTOM_MEASURE_SQUEEZING = 2,
    DPTOM_MEASURE_FLUCTUATIONS = 4,
};

typedef struct dptom_grid_spec {
    double dtilde_min, dtilde_max;
    int nx;
    double g_min, g_max;
    int ny;
} dptom_grid_spec;

/* branch_rule: 0 = region convention (A,B -> III, C -> I), 1..3 = forced. */
DPTOM_API dptom_status dptom_sweep_grid(const dptom_grid_spec* spec, double kappa,
                                        double gamma_m, double omega_m, unsigned measures,
                                        int branch_rule, int threads,
                                        const dptom_tolerances* tol, dptom_phasemap** out);

typedef struct dptom_cell {
    double dtilde, g;
    char label[12];
    unsigned stable_mask;
    int consistent;
    double n[3]; /* NaN when unphysical */
    int physical[3];
    double gap_real, gap_imag; /* of the selected branch, NaN when none */
    int selected_branch;       /* 0 when none */
    double log_neg, min_eig, fluct;
    int measure_error;
} dptom_cell;

DPTOM_API dptom_status dptom_phasemap_cell(const dptom_phasemap* m, int ix, int iy,
                                           dptom_cell* out);
DPTOM_API void dptom_phasemap_dims(const dptom_phasemap* m, int* nx, int* ny);
DPTOM_API void dptom_phasemap_destroy(dptom_phasemap* m);

/* ------------------------------------------------------------------ */
/* Transitions, boundaries, critical point                             */
/* ------------------------------------------------------------------ */

typedef enum dptom_transition_kind {
    DPTOM_TRANSITION_CONTINUOUS = 0,
    DPTOM_TRANSITION_DISCONTINUOUS = 1,
    DPTOM_TRANSITION_HARD = 2,
} dptom_transition_kind;

DPTOM_API const char* dptom_transition_kind_name(dptom_transition_kind k);

typedef struct dptom_transition {
    double position;
    int kind; /* dptom_transition_kind */
    int branch_from, branch_to;
    double n_jump;
    double lambda_imag;
} dptom_transition;

/* axis: 0 = sweep G at fixed dtilde, 1 = sweep dtilde at fixed G. */
DPTOM_API dptom_status dptom_slice_transitions(int axis, double fixed_value, double lo,
                                               double hi, int resolution, double kappa,
                                               double gamma_m, double omega_m,
                                               const dptom_tolerances* tol,
                                               dptom_transition* out, size_t capacity,
                                               size_t* n_events);

/* kind: 0 = soft margin of a branch, 1 = hard margin, 2 = branch-2/3 fold.
 * Writes up to capacity (dtilde, g) pairs; lost_track reports a corrector
 * failure with the partial polyline still returned. */
DPTOM_API dptom_status dptom_trace_boundary(int kind, int branch_index, double seed_dtilde,
                                            double seed_g, double step, size_t max_points,
                                            double kappa, double gamma_m, double omega_m,
                                            double* xy_out, size_t capacity, size_t* n_points,
                                            int* lost_track);

typedef struct dptom_critical {
    double dtilde_c, g_c;
    double soft_residual, fold_residual;
    double nu_adr, nu_c;   /* NaN until exponents are fitted */
    double r2_adr, r2_c;
    double window_lo, window_hi;
    int n_samples;
} dptom_critical;

DPTOM_API dptom_status dptom_find_critical_point(double kappa, double gamma_m, double omega_m,
                                                 dptom_critical* out);
/* side: 0 approaches G_c from below (branch-1 stable side), 1 from above. */
DPTOM_API dptom_status dptom_estimate_exponents(double kappa, double gamma_m, double omega_m,
                                                double dist_lo, double dist_hi, int n_samples,
                                                int side, dptom_critical* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DPTOM_H */
