#ifndef MEMSFOLD_H
#define MEMSFOLD_H

/* C interface to the memsfold bifurcation toolkit. All handles are opaque and
 * owned by the caller once returned; release them with the matching *_free.
 * Strings returned through char** are heap-allocated; release with
 * mf_string_free. Functions are reentrant; the last error message is kept per
 * thread. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MF_API __declspec(dllexport)
#else
#define MF_API __attribute__((visibility("default")))
#endif

typedef enum mf_status {
    MF_OK = 0,
    MF_ERR_INVALID_ARGUMENT = 1,
    MF_ERR_DOMAIN = 2,
    MF_ERR_INTEGRATION = 3,
    MF_ERR_CONVERGENCE = 4,
    MF_ERR_IO = 5,
    MF_ERR_INTERNAL = 6
} mf_status;

typedef enum mf_stability {
    MF_STABLE = 0,
    MF_UNSTABLE = 1,
    MF_STABILITY_UNKNOWN = 2
} mf_stability;

typedef enum mf_fold_kind {
    MF_FOLD_LOWER = 0, /* local minimum of lambda */
    MF_FOLD_UPPER = 1  /* local maximum of lambda */
} mf_fold_kind;

typedef struct mf_config {
    double tol_abs;
    double tol_rel;
    double root_tol;
    double rho;
    double sigma;
    int n_seeds;
    int stability_grid;
    double h0;
    double h_min;
    double h_max;
    double s_max;
    double lambda_max;
    int singular_grid;
    int plot_width;
    int plot_height;
} mf_config;

MF_API const char* mf_version(void);
MF_API const char* mf_status_string(mf_status status);
/* Message of the last failing call on this thread ("" if none). */
MF_API const char* mf_last_error(void);
MF_API void mf_string_free(char* s);

MF_API void mf_config_default(mf_config* cfg);
/* Sets one field by name from its textual value. */
MF_API mf_status mf_config_set(mf_config* cfg, const char* key, const char* value);
/* Reads flat "key = value" lines; '#' starts a comment. */
MF_API mf_status mf_config_load(const char* path, mf_config* cfg);

/* ---- steady states at fixed (eps, lambda) ---- */
typedef struct mf_solutions mf_solutions;

MF_API mf_status mf_solve(double eps, double lambda, const mf_config* cfg, mf_solutions** out);
MF_API size_t mf_solutions_count(const mf_solutions* s);
MF_API mf_status mf_solution_info(const mf_solutions* s, size_t i, double* w0, double* norm2,
                                  mf_stability* stability);
/* Borrowed pointers valid until mf_solutions_free. */
MF_API mf_status mf_solution_profile(const mf_solutions* s, size_t i, const double** x,
                                     const double** u, const double** w, size_t* n);
MF_API void mf_solutions_free(mf_solutions* s);

/* ---- continuation ---- */
typedef struct mf_branch mf_branch;

typedef struct mf_branch_point {
    double lambda;
    double eps;
    double delta;
    double w0;
    double norm2;
    double residual;
    double arclength;
    mf_stability stability;
    int is_fold;
} mf_branch_point;

typedef struct mf_fold {
    double lambda;
    double w0;
    double norm2;
    double dlambda_ds;
    mf_fold_kind kind;
    size_t index;
} mf_fold;

/* Traces the S-curve from the lower branch, refines folds and, if classify is
 * non-zero, labels stability. */
MF_API mf_status mf_branch_compute(double eps, const mf_config* cfg, int classify, mf_branch** out);
MF_API size_t mf_branch_size(const mf_branch* b);
MF_API mf_status mf_branch_get_point(const mf_branch* b, size_t i, mf_branch_point* out);
MF_API size_t mf_branch_fold_count(const mf_branch* b);
MF_API mf_status mf_branch_get_fold(const mf_branch* b, size_t i, mf_fold* out);
/* 1 when the corrector failed at the minimum step. */
MF_API int mf_branch_truncated(const mf_branch* b);
/* branch_id,idx,eps,lambda,delta,w0,norm_u2,stability,is_fold */
MF_API mf_status mf_branch_csv(const mf_branch* b, int branch_id, int with_header, char** out);
MF_API void mf_branch_free(mf_branch* b);

/* ---- reports ---- */
/* JSON list of {eps, lambda_star_numeric, lambda_star_asymptotic, abs_error,
 * lambda_upper_numeric}. */
MF_API mf_status mf_fold_report_json(const double* eps, size_t n, const mf_config* cfg, char** out);

/* kind: 1, 2, 3 for types I, II, III, 0 for the full eps = 0 diagram.
 * param is delta for type I; grid is the u_min count for type III and the
 * per-arc count for the diagram. CSV: kind,param,lambda,norm_u2 */
MF_API mf_status mf_singular_csv(int kind, double param, int grid, char** out);
/* x,u,w samples of a singular profile (types I, II) or of the type-III
 * solution with u_min = param. */
MF_API mf_status mf_singular_profile_csv(int kind, double param, char** out);

/* Invariant suite of the blow-up charts; *all_pass receives 1 when every
 * check passes. */
MF_API mf_status mf_charts_check_json(const mf_config* cfg, char** out, int* all_pass);

/* what: "lambda-star", "norm-upper", "xi-out" or "slope". eps_list is used by
 * lambda-star and xi-out; eps by norm-upper and slope; delta by xi-out. */
MF_API mf_status mf_compare_csv(const char* what, double eps, double delta, const double* eps_list, size_t n,
                                const mf_config* cfg, char** out);

/* Asymptotic evaluators. */
MF_API mf_status mf_lambda_star_lower(double eps, double* out);
MF_API mf_status mf_norm_upper(double eps, double lambda, double* out);
MF_API mf_status mf_fold_slope(double eps, double* out);

#ifdef __cplusplus
}
#endif

#endif
