#include "memsfold/memsfold.h"

#include "asymptotics.hpp"
#include "charts.hpp"
#include "continuation.hpp"
#include "errors.hpp"
#include "shooting.hpp"
#include "singular.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

using namespace memsfold;

struct mf_solutions {
    double eps = 0.0;
    double lambda = 0.0;
    std::vector<Solution> items;
    std::vector<Stability> stability;
};

struct mf_branch {
    Branch branch;
};

namespace {

thread_local std::string g_last_error;

mf_status fail(mf_status s, const std::string& msg)
{
    g_last_error = msg;
    return s;
}

// Maps exceptions from the core onto status codes.
mf_status guarded(const std::function<void()>& body)
{
    try {
        body();
        return MF_OK;
    } catch (const DomainError& e) {
        return fail(MF_ERR_DOMAIN, e.what());
    } catch (const IntegrationError& e) {
        return fail(MF_ERR_INTEGRATION, e.what());
    } catch (const ConvergenceError& e) {
        return fail(MF_ERR_CONVERGENCE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(MF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MF_ERR_INTERNAL, "unknown exception");
    }
}

char* dup_string(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

mf_config resolve(const mf_config* cfg)
{
    mf_config c;
    mf_config_default(&c);
    return cfg ? *cfg : c;
}

ShootingOptions shooting_options(const mf_config& c)
{
    ShootingOptions s;
    s.tol = {c.tol_abs, c.tol_rel};
    s.root_tol = c.root_tol;
    return s;
}

FindOptions find_options(const mf_config& c)
{
    FindOptions f;
    f.shooting = shooting_options(c);
    f.n_seeds = c.n_seeds;
    return f;
}

ContinuationOptions continuation_options(const mf_config& c)
{
    ContinuationOptions o;
    o.shooting = shooting_options(c);
    o.h0 = c.h0;
    o.h_min = c.h_min;
    o.h_max = c.h_max;
    o.s_max = c.s_max;
    o.lambda_max = c.lambda_max;
    return o;
}

StabilityOptions stability_options(const mf_config& c)
{
    StabilityOptions s;
    s.n = c.stability_grid;
    return s;
}

mf_stability to_c(Stability s)
{
    switch (s) {
    case Stability::Stable:
        return MF_STABLE;
    case Stability::Unstable:
        return MF_UNSTABLE;
    default:
        return MF_STABILITY_UNKNOWN;
    }
}

std::string profile_csv(const SolutionProfile& pr)
{
    std::string s = "x,u,w\n";
    for (std::size_t i = 0; i < pr.x.size(); ++i)
        s += num(pr.x[i]) + "," + num(pr.u[i]) + "," + num(pr.w[i]) + "\n";
    return s;
}

std::string compare_lambda_star(const std::vector<double>& eps_list, const mf_config& c)
{
    std::string s = "eps,lambda_star_numeric,lambda_star_asymptotic,abs_error,error_over_eps2\n";
    for (const auto& r : fold_report(eps_list, continuation_options(c))) {
        if (!r.ok)
            throw ConvergenceError("eps=" + num(r.eps) + ": " + r.error);
        s += num(r.eps) + "," + num(r.lambda_star_numeric) + "," + num(r.lambda_star_asymptotic) + "," +
             num(r.abs_error) + "," + num(r.abs_error / (r.eps * r.eps)) + "\n";
    }
    return s;
}

std::string compare_norm_upper(double eps, const mf_config& c)
{
    if (!(eps > 0.0 && eps <= 0.1))
        throw DomainError("norm-upper: eps must lie in (0, 0.1]");
    const double scale = std::pow(eps, 1.5) * std::abs(std::log(eps));
    std::string s = "lambda,norm_numeric,norm_asymptotic,abs_error,error_over_scale\n";
    const double lo = 2.0 * eps, hi = 1.0;
    const int n = 12;
    for (int i = 0; i < n; ++i) {
        const double lambda = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        const auto sols = find_solutions(ModelParams(eps, lambda), find_options(c));
        if (sols.empty())
            throw ConvergenceError("norm-upper: no solution at lambda=" + num(lambda));
        const double N = sols.back().profile.norm2;
        const double a = norm_upper(eps, lambda);
        s += num(lambda) + "," + num(N) + "," + num(a) + "," + num(std::abs(N - a)) + "," +
             num(std::abs(N - a) / scale) + "\n";
    }
    return s;
}

std::string compare_xi_out(const std::vector<double>& eps_list, double delta, const mf_config& c)
{
    const double wstar = -2.0 / std::sqrt(3.0);
    std::string s = "eps,delta,xi1_numeric,xi1_expansion,abs_error\n";
    for (double eps : eps_list) {
        const auto tr = transition_K1(wstar, eps, delta, c.sigma);
        const double ex = xi1_out_expansion(delta, eps);
        s += num(eps) + "," + num(delta) + "," + num(tr.xi1_out) + "," + num(ex) + "," +
             num(std::abs(tr.xi1_out - ex)) + "\n";
    }
    return s;
}

std::string compare_slope(double eps, const mf_config& c)
{
    const auto rows = fold_report({eps}, continuation_options(c));
    if (!rows[0].ok)
        throw ConvergenceError(rows[0].error);
    const double ls = rows[0].lambda_star_numeric;
    const double lc = ls * (1.0 + eps);
    const double d = upper_norm_slope(eps, lc, 0.5 * eps * ls, find_options(c));
    const double a = fold_slope(eps);
    return "eps,lambda_star_numeric,lambda_center,slope_numeric,slope_expansion,rel_error\n" + num(eps) +
           "," + num(ls) + "," + num(lc) + "," + num(d) + "," + num(a) + "," + num(std::abs(d - a) / std::abs(a)) +
           "\n";
}

} // namespace

extern "C" {

const char* mf_version(void)
{
    return "1.0.0";
}

const char* mf_status_string(mf_status status)
{
    switch (status) {
    case MF_OK:
        return "ok";
    case MF_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case MF_ERR_DOMAIN:
        return "domain error";
    case MF_ERR_INTEGRATION:
        return "integration error";
    case MF_ERR_CONVERGENCE:
        return "convergence error";
    case MF_ERR_IO:
        return "i/o error";
    case MF_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char* mf_last_error(void)
{
    return g_last_error.c_str();
}

void mf_string_free(char* s)
{
    std::free(s);
}

void mf_config_default(mf_config* cfg)
{
    if (!cfg)
        return;
    const ShootingOptions so;
    const ContinuationOptions co;
    const SectionSpec sec;
    cfg->tol_abs = so.tol.abs;
    cfg->tol_rel = so.tol.rel;
    cfg->root_tol = so.root_tol;
    cfg->rho = sec.rho;
    cfg->sigma = sec.sigma;
    cfg->n_seeds = FindOptions{}.n_seeds;
    cfg->stability_grid = StabilityOptions{}.n;
    cfg->h0 = co.h0;
    cfg->h_min = co.h_min;
    cfg->h_max = co.h_max;
    cfg->s_max = co.s_max;
    cfg->lambda_max = co.lambda_max;
    cfg->singular_grid = 200;
    cfg->plot_width = 720;
    cfg->plot_height = 480;
}

mf_status mf_config_set(mf_config* cfg, const char* key, const char* value)
{
    if (!cfg || !key || !value)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_config_set: null argument");
    const std::string k = key;
    double* dfield = nullptr;
    int* ifield = nullptr;
    if (k == "tol_abs") dfield = &cfg->tol_abs;
    else if (k == "tol_rel") dfield = &cfg->tol_rel;
    else if (k == "root_tol") dfield = &cfg->root_tol;
    else if (k == "rho") dfield = &cfg->rho;
    else if (k == "sigma") dfield = &cfg->sigma;
    else if (k == "h0") dfield = &cfg->h0;
    else if (k == "h_min") dfield = &cfg->h_min;
    else if (k == "h_max") dfield = &cfg->h_max;
    else if (k == "s_max") dfield = &cfg->s_max;
    else if (k == "lambda_max") dfield = &cfg->lambda_max;
    else if (k == "n_seeds") ifield = &cfg->n_seeds;
    else if (k == "stability_grid") ifield = &cfg->stability_grid;
    else if (k == "singular_grid") ifield = &cfg->singular_grid;
    else if (k == "plot_width") ifield = &cfg->plot_width;
    else if (k == "plot_height") ifield = &cfg->plot_height;
    else
        return fail(MF_ERR_INVALID_ARGUMENT, "unknown config key '" + k + "'");

    char* end = nullptr;
    const double v = std::strtod(value, &end);
    if (end == value || *end != '\0' || !std::isfinite(v))
        return fail(MF_ERR_INVALID_ARGUMENT, "config key '" + k + "': not a number: '" + value + "'");
    if (dfield) {
        if (!(v > 0.0))
            return fail(MF_ERR_INVALID_ARGUMENT, "config key '" + k + "' must be positive");
        *dfield = v;
    } else {
        if (v != std::floor(v) || v < 1.0 || v > 1e7)
            return fail(MF_ERR_INVALID_ARGUMENT, "config key '" + k + "' must be a positive integer");
        *ifield = static_cast<int>(v);
    }
    return MF_OK;
}

mf_status mf_config_load(const char* path, mf_config* cfg)
{
    if (!path || !cfg)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_config_load: null argument");
    std::ifstream in(path);
    if (!in)
        return fail(MF_ERR_IO, std::string("cannot open config file '") + path + "'");
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            return fail(MF_ERR_INVALID_ARGUMENT,
                        std::string(path) + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (mf_config_set(cfg, k.c_str(), v.c_str()) != MF_OK)
            return fail(MF_ERR_INVALID_ARGUMENT,
                        std::string(path) + ":" + std::to_string(lineno) + ": " + g_last_error);
    }
    return MF_OK;
}

mf_status mf_solve(double eps, double lambda, const mf_config* cfg, mf_solutions** out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_solve: null output pointer");
    *out = nullptr;
    return guarded([&] {
        const mf_config c = resolve(cfg);
        const ModelParams p(eps, lambda);
        auto h = std::make_unique<mf_solutions>();
        h->eps = eps;
        h->lambda = lambda;
        h->items = find_solutions(p, find_options(c));
        for (const auto& s : h->items)
            h->stability.push_back(classify_stability(s.profile, p, stability_options(c)));
        *out = h.release();
    });
}

size_t mf_solutions_count(const mf_solutions* s)
{
    return s ? s->items.size() : 0;
}

mf_status mf_solution_info(const mf_solutions* s, size_t i, double* w0, double* norm2, mf_stability* stability)
{
    if (!s || i >= s->items.size())
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_solution_info: bad handle or index");
    if (w0)
        *w0 = s->items[i].profile.w0;
    if (norm2)
        *norm2 = s->items[i].profile.norm2;
    if (stability)
        *stability = to_c(s->stability[i]);
    return MF_OK;
}

mf_status mf_solution_profile(const mf_solutions* s, size_t i, const double** x, const double** u,
                              const double** w, size_t* n)
{
    if (!s || i >= s->items.size())
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_solution_profile: bad handle or index");
    const auto& pr = s->items[i].profile;
    if (x)
        *x = pr.x.data();
    if (u)
        *u = pr.u.data();
    if (w)
        *w = pr.w.data();
    if (n)
        *n = pr.x.size();
    return MF_OK;
}

void mf_solutions_free(mf_solutions* s)
{
    delete s;
}

mf_status mf_branch_compute(double eps, const mf_config* cfg, int classify, mf_branch** out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_branch_compute: null output pointer");
    *out = nullptr;
    return guarded([&] {
        const mf_config c = resolve(cfg);
        const auto opt = continuation_options(c);
        auto h = std::make_unique<mf_branch>();
        const Branch raw = trace_branch(eps, opt);
        h->branch = with_folds(raw, detect_folds(raw, opt));
        if (classify)
            annotate_stability(h->branch, opt, stability_options(c));
        *out = h.release();
    });
}

size_t mf_branch_size(const mf_branch* b)
{
    return b ? b->branch.points.size() : 0;
}

mf_status mf_branch_get_point(const mf_branch* b, size_t i, mf_branch_point* out)
{
    if (!b || !out || i >= b->branch.points.size())
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_branch_get_point: bad handle or index");
    const auto& p = b->branch.points[i];
    *out = {p.lambda, p.eps, p.delta, p.w0, p.norm2, p.residual, p.arclength, to_c(p.stability),
            p.is_fold ? 1 : 0};
    return MF_OK;
}

size_t mf_branch_fold_count(const mf_branch* b)
{
    return b ? b->branch.folds.size() : 0;
}

mf_status mf_branch_get_fold(const mf_branch* b, size_t i, mf_fold* out)
{
    if (!b || !out || i >= b->branch.folds.size())
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_branch_get_fold: bad handle or index");
    const auto& f = b->branch.folds[i];
    *out = {f.lambda, f.w0, f.norm2, f.dlambda_ds, f.kind == FoldKind::Lower ? MF_FOLD_LOWER : MF_FOLD_UPPER,
            f.index};
    return MF_OK;
}

int mf_branch_truncated(const mf_branch* b)
{
    return b && b->branch.truncated ? 1 : 0;
}

mf_status mf_branch_csv(const mf_branch* b, int branch_id, int with_header, char** out)
{
    if (!b || !out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_branch_csv: null argument");
    return guarded([&] {
        std::string s;
        if (with_header)
            s = "branch_id,idx,eps,lambda,delta,w0,norm_u2,stability,is_fold\n";
        const auto& pts = b->branch.points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            s += std::to_string(branch_id) + "," + std::to_string(i) + "," + num(p.eps) + "," + num(p.lambda) +
                 "," + num(p.delta) + "," + num(p.w0) + "," + num(p.norm2) + "," + to_string(p.stability) + "," +
                 (p.is_fold ? "1" : "0") + "\n";
        }
        *out = dup_string(s);
    });
}

void mf_branch_free(mf_branch* b)
{
    delete b;
}

mf_status mf_fold_report_json(const double* eps, size_t n, const mf_config* cfg, char** out)
{
    if (!out || (!eps && n > 0))
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_fold_report_json: null argument");
    if (n == 0)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_fold_report_json: empty eps list");
    return guarded([&] {
        const mf_config c = resolve(cfg);
        const auto rows = fold_report(std::vector<double>(eps, eps + n), continuation_options(c));
        nlohmann::json j = nlohmann::json::array();
        std::string errors;
        for (const auto& r : rows) {
            if (!r.ok) {
                errors += (errors.empty() ? "" : "; ") + std::string("eps=") + num(r.eps) + ": " + r.error;
                continue;
            }
            j.push_back({{"eps", r.eps},
                         {"lambda_star_numeric", r.lambda_star_numeric},
                         {"lambda_star_asymptotic", r.lambda_star_asymptotic},
                         {"abs_error", r.abs_error},
                         {"lambda_upper_numeric", r.lambda_upper_numeric}});
        }
        if (!errors.empty())
            throw ConvergenceError(errors);
        *out = dup_string(j.dump(2) + "\n");
    });
}

mf_status mf_singular_csv(int kind, double param, int grid, char** out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_singular_csv: null output pointer");
    if (kind < 0 || kind > 3)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_singular_csv: kind must be 0..3");
    return guarded([&] {
        std::string s = "kind,param,lambda,norm_u2\n";
        auto row = [&](const std::string& k, double a, double l, double N) {
            s += k + "," + num(a) + "," + num(l) + "," + num(N) + "\n";
        };
        if (kind == 0) {
            for (const auto& d : singular_diagram(grid))
                row(d.kind, d.param, d.lambda, d.norm2);
        } else if (kind == 1) {
            row("I", param, 0.0, type1_orbit(param, 3).norm2);
        } else if (kind == 2) {
            row("II", 0.0, 0.0, type2_orbit(3).norm2);
        } else {
            for (const auto& pt : type3_branch(type3_grid(grid)))
                if (pt.ok)
                    row("III", pt.u_min, pt.lambda, pt.norm2);
            const auto f = type3_fold();
            row("III-fold", f.u_min, f.lambda, f.norm2);
        }
        *out = dup_string(s);
    });
}

mf_status mf_singular_profile_csv(int kind, double param, char** out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_singular_profile_csv: null output pointer");
    if (kind < 1 || kind > 3)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_singular_profile_csv: kind must be 1..3");
    return guarded([&] {
        const SingularOrbit o = kind == 1 ? type1_orbit(param) : kind == 2 ? type2_orbit() : type3_orbit(param);
        *out = dup_string(profile_csv(o.profile));
    });
}

mf_status mf_charts_check_json(const mf_config* cfg, char** out, int* all_pass)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_charts_check_json: null output pointer");
    return guarded([&] {
        const mf_config c = resolve(cfg);
        ChartsCheckOptions opt;
        opt.sections.rho = c.rho;
        opt.sections.sigma = c.sigma;
        const auto rep = charts_check(opt);
        nlohmann::json items = nlohmann::json::array();
        for (const auto& it : rep.items)
            items.push_back({{"name", it.name},
                             {"measured", it.measured},
                             {"threshold", it.threshold},
                             {"pass", it.pass},
                             {"detail", it.detail}});
        const nlohmann::json j = {{"all_pass", rep.all_pass()}, {"checks", items}};
        if (all_pass)
            *all_pass = rep.all_pass() ? 1 : 0;
        *out = dup_string(j.dump(2) + "\n");
    });
}

mf_status mf_compare_csv(const char* what, double eps, double delta, const double* eps_list, size_t n,
                         const mf_config* cfg, char** out)
{
    if (!what || !out || (!eps_list && n > 0))
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_compare_csv: null argument");
    const std::string w = what;
    if (w != "lambda-star" && w != "norm-upper" && w != "xi-out" && w != "slope")
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_compare_csv: unknown comparison '" + w + "'");
    if ((w == "lambda-star" || w == "xi-out") && n == 0)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_compare_csv: '" + w + "' needs an eps list");
    return guarded([&] {
        const mf_config c = resolve(cfg);
        const std::vector<double> list(eps_list, eps_list + n);
        std::string s;
        if (w == "lambda-star")
            s = compare_lambda_star(list, c);
        else if (w == "norm-upper")
            s = compare_norm_upper(eps, c);
        else if (w == "xi-out")
            s = compare_xi_out(list, delta, c);
        else
            s = compare_slope(eps, c);
        *out = dup_string(s);
    });
}

mf_status mf_lambda_star_lower(double eps, double* out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_lambda_star_lower: null output pointer");
    return guarded([&] { *out = lambda_star_lower(eps); });
}

mf_status mf_norm_upper(double eps, double lambda, double* out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_norm_upper: null output pointer");
    return guarded([&] { *out = norm_upper(eps, lambda); });
}

mf_status mf_fold_slope(double eps, double* out)
{
    if (!out)
        return fail(MF_ERR_INVALID_ARGUMENT, "mf_fold_slope: null output pointer");
    return guarded([&] { *out = fold_slope(eps); });
}

} // extern "C"
