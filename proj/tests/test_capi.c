/* Exercises the C interface from C. */
#include "memsfold/memsfold.h"

#include <math.h>
#include <pthread.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                         \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

static void test_config(void)
{
    mf_config c;
    mf_config_default(&c);
    CHECK(c.tol_abs == 1e-12);
    CHECK(c.n_seeds == 400);
    CHECK(c.stability_grid == 2001);
    CHECK(mf_config_set(&c, "n_seeds", "250") == MF_OK && c.n_seeds == 250);
    CHECK(mf_config_set(&c, "h_max", "0.02") == MF_OK && c.h_max == 0.02);
    CHECK(mf_config_set(&c, "bogus", "1") == MF_ERR_INVALID_ARGUMENT);
    CHECK(strstr(mf_last_error(), "bogus") != NULL);
    CHECK(mf_config_set(&c, "n_seeds", "2.5") == MF_ERR_INVALID_ARGUMENT);
    CHECK(mf_config_set(&c, "tol_abs", "abc") == MF_ERR_INVALID_ARGUMENT);
    CHECK(mf_config_set(&c, "tol_abs", "-1") == MF_ERR_INVALID_ARGUMENT);

    const char* path = "capi_test_config.txt";
    FILE* f = fopen(path, "w");
    fprintf(f, "# comment\n  tol_rel = 1e-9  \n\nsingular_grid=50 # trailing\n");
    fclose(f);
    mf_config_default(&c);
    CHECK(mf_config_load(path, &c) == MF_OK);
    CHECK(c.tol_rel == 1e-9);
    CHECK(c.singular_grid == 50);
    f = fopen(path, "w");
    fprintf(f, "tol_rel 1e-9\n");
    fclose(f);
    CHECK(mf_config_load(path, &c) == MF_ERR_INVALID_ARGUMENT);
    CHECK(strstr(mf_last_error(), ":1:") != NULL);
    remove(path);
    CHECK(mf_config_load("/nonexistent/cfg", &c) == MF_ERR_IO);
}

static void test_solve(void)
{
    mf_solutions* s = NULL;
    CHECK(mf_solve(0.05, 0.2026, NULL, &s) == MF_OK);
    CHECK(mf_solutions_count(s) == 3);
    const mf_stability expect[3] = {MF_STABLE, MF_UNSTABLE, MF_STABLE};
    double last = -1.0;
    for (size_t i = 0; i < mf_solutions_count(s); ++i) {
        double w0, n2;
        mf_stability st;
        CHECK(mf_solution_info(s, i, &w0, &n2, &st) == MF_OK);
        CHECK(st == expect[i]);
        CHECK(n2 > last);
        last = n2;
        const double *x, *u, *w;
        size_t n = 0;
        CHECK(mf_solution_profile(s, i, &x, &u, &w, &n) == MF_OK);
        CHECK(n > 10);
        CHECK(fabs(x[0] + 1.0) < 1e-12 && fabs(u[0]) < 1e-9);
        CHECK(fabs(w[0] - w0) < 1e-9 * fabs(w0) + 1e-12);
    }
    CHECK(mf_solution_info(s, 3, NULL, NULL, NULL) == MF_ERR_INVALID_ARGUMENT);
    mf_solutions_free(s);

    s = (mf_solutions*)0x1;
    CHECK(mf_solve(-1.0, 0.2, NULL, &s) == MF_ERR_DOMAIN);
    CHECK(s == NULL);
    CHECK(strlen(mf_last_error()) > 0);
    CHECK(mf_solve(0.05, 0.2, NULL, NULL) == MF_ERR_INVALID_ARGUMENT);
    mf_solutions_free(NULL);
}

static void test_branch(void)
{
    mf_branch* b = NULL;
    CHECK(mf_branch_compute(0.05, NULL, 1, &b) == MF_OK);
    CHECK(mf_branch_size(b) > 20);
    CHECK(mf_branch_fold_count(b) == 2);
    CHECK(!mf_branch_truncated(b));
    mf_fold f;
    int lower = 0, upper = 0;
    for (size_t i = 0; i < mf_branch_fold_count(b); ++i) {
        CHECK(mf_branch_get_fold(b, i, &f) == MF_OK);
        mf_branch_point p;
        CHECK(mf_branch_get_point(b, f.index, &p) == MF_OK);
        CHECK(p.is_fold == 1);
        if (f.kind == MF_FOLD_LOWER) {
            ++lower;
            CHECK(fabs(f.lambda - 0.0532318586) < 1e-9);
        } else {
            ++upper;
            CHECK(fabs(f.lambda - 0.352005888) < 1e-8);
        }
    }
    CHECK(lower == 1 && upper == 1);
    char* csv = NULL;
    CHECK(mf_branch_csv(b, 7, 1, &csv) == MF_OK);
    const char* header = "branch_id,idx,eps,lambda,delta,w0,norm_u2,stability,is_fold\n";
    CHECK(strncmp(csv, header, strlen(header)) == 0);
    CHECK(strstr(csv, "\n7,0,0.050000000000000003,") != NULL);
    mf_string_free(csv);
    CHECK(mf_branch_csv(b, 0, 0, &csv) == MF_OK);
    CHECK(strncmp(csv, "0,0,", 4) == 0);
    mf_string_free(csv);
    CHECK(mf_branch_get_point(b, mf_branch_size(b), &(mf_branch_point){0}) == MF_ERR_INVALID_ARGUMENT);
    mf_branch_free(b);
}

static void test_reports(void)
{
    const double eps[2] = {0.05, 0.02};
    char* j = NULL;
    CHECK(mf_fold_report_json(eps, 2, NULL, &j) == MF_OK);
    CHECK(strstr(j, "\"lambda_star_numeric\"") && strstr(j, "\"lambda_star_asymptotic\"") &&
          strstr(j, "\"abs_error\"") && strstr(j, "\"lambda_upper_numeric\"") && strstr(j, "\"eps\""));
    mf_string_free(j);
    const double bad[1] = {0.5};
    CHECK(mf_fold_report_json(bad, 1, NULL, &j) == MF_ERR_CONVERGENCE);
    CHECK(mf_fold_report_json(eps, 0, NULL, &j) == MF_ERR_INVALID_ARGUMENT);

    char* s = NULL;
    CHECK(mf_singular_csv(2, 0.0, 10, &s) == MF_OK);
    CHECK(strcmp(s, "kind,param,lambda,norm_u2\nII,0,0,0.66666666666666663\n") == 0);
    mf_string_free(s);
    CHECK(mf_singular_csv(3, 0.0, 20, &s) == MF_OK);
    CHECK(strstr(s, "III-fold,0.6116") != NULL);
    mf_string_free(s);
    CHECK(mf_singular_csv(1, 2.0, 10, &s) == MF_ERR_DOMAIN);
    CHECK(mf_singular_csv(7, 0.0, 10, &s) == MF_ERR_INVALID_ARGUMENT);
    CHECK(mf_singular_profile_csv(2, 0.0, &s) == MF_OK);
    CHECK(strncmp(s, "x,u,w\n", 6) == 0);
    mf_string_free(s);

    int pass = 1;
    CHECK(mf_charts_check_json(NULL, &s, &pass) == MF_OK);
    CHECK(pass == 0);
    CHECK(strstr(s, "\"expint_log_slope\"") != NULL);
    mf_string_free(s);

    const double xl[2] = {1e-2, 1e-3};
    CHECK(mf_compare_csv("xi-out", 0.0, 1.0, xl, 2, NULL, &s) == MF_OK);
    CHECK(strncmp(s, "eps,delta,xi1_numeric,xi1_expansion,abs_error\n", 46) == 0);
    mf_string_free(s);
    CHECK(mf_compare_csv("nope", 0.0, 1.0, xl, 2, NULL, &s) == MF_ERR_INVALID_ARGUMENT);
    CHECK(mf_compare_csv("lambda-star", 0.0, 1.0, NULL, 0, NULL, &s) == MF_ERR_INVALID_ARGUMENT);

    double v = 0.0;
    CHECK(mf_lambda_star_lower(0.01, &v) == MF_OK && fabs(v - 0.008582097502641096) < 1e-15);
    CHECK(mf_fold_slope(0.01, &v) == MF_OK && fabs(v - 73.121037005557085) < 1e-10);
    CHECK(mf_norm_upper(0.01, 0.001, &v) == MF_ERR_DOMAIN);
    CHECK(strcmp(mf_status_string(MF_ERR_DOMAIN), "domain error") == 0);
}

static void* other_thread(void* arg)
{
    (void)arg;
    /* a fresh thread starts with an empty message */
    const int clean = mf_last_error()[0] == '\0';
    mf_config c;
    mf_config_default(&c);
    mf_config_set(&c, "other_thread_key", "1");
    return (void*)(size_t)clean;
}

static void test_thread_local_error(void)
{
    mf_config c;
    mf_config_default(&c);
    CHECK(mf_config_set(&c, "main_thread_key", "1") == MF_ERR_INVALID_ARGUMENT);
    pthread_t t;
    void* clean = NULL;
    pthread_create(&t, NULL, other_thread, NULL);
    pthread_join(t, &clean);
    CHECK(clean != NULL);
    CHECK(strstr(mf_last_error(), "main_thread_key") != NULL);
}

int main(void)
{
    test_config();
    test_solve();
    test_branch();
    test_reports();
    test_thread_local_error();
    if (failures)
        fprintf(stderr, "%d check(s) failed\n", failures);
    else
        printf("all C API checks passed\n");
    return failures ? 1 : 0;
}
