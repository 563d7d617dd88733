// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failing criteria, or with --known-red, 0 iff
// the failing set equals the given list.
#include "asymptotics.hpp"
#include "charts.hpp"
#include "continuation.hpp"
#include "shooting.hpp"
#include "singular.hpp"

#include "CLI11.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace memsfold;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.4g")
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(f, v[i]);
    return "[" + s + "]";
}

double lower_fold(const std::vector<FoldPoint>& folds, FoldKind kind)
{
    for (const auto& f : folds)
        if (f.kind == kind)
            return f.lambda;
    return NAN;
}

// 1: S-shape at eps = 0.05
Outcome c1()
{
    const double eps = 0.05;
    const Branch br = trace_branch(eps);
    const auto folds = detect_folds(br);
    const double lo = lower_fold(folds, FoldKind::Lower), hi = lower_fold(folds, FoldKind::Upper);
    const ModelParams mid(eps, 0.5 * (lo + hi));
    const std::size_t n_mid = find_solutions(mid).size();
    const std::size_t n_below = find_solutions(ModelParams(eps, 0.5 * lo)).size();
    const std::size_t n_above = find_solutions(ModelParams(eps, 1.2 * hi)).size();
    Outcome o;
    o.pass = folds.size() == 2 && lo < hi && n_mid == 3 && n_below == 1 && n_above == 1;
    std::ostringstream d;
    d << "folds=" << folds.size() << " lambda_lower=" << fmt("%.10g", lo) << " lambda_upper=" << fmt("%.10g", hi)
      << " solutions(mid, below, above)=" << n_mid << "," << n_below << "," << n_above;
    o.detail = d.str();
    return o;
}

// 2: lower-fold remainder / eps^2 bounded and non-increasing
Outcome c2()
{
    const std::vector<double> eps = {0.05, 0.02, 0.01, 0.005};
    const auto rows = fold_report(eps);
    std::vector<double> ratio, corrected;
    for (const auto& r : rows) {
        if (!r.ok)
            return {false, "eps=" + fmt("%g", r.eps) + ": " + r.error};
        ratio.push_back(r.abs_error / (r.eps * r.eps));
        // diagnostic only: eps^2 ln eps coefficient sqrt6/4 + 9/8
        const double alt = 0.75 * r.eps - (std::sqrt(6.0) / 4.0 + 9.0 / 8.0) * r.eps * r.eps * std::log(r.eps);
        corrected.push_back((alt - r.lambda_star_numeric) / (r.eps * r.eps));
    }
    const double bound = 2.0;
    bool ok = true;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        ok = ok && ratio[i] <= bound;
        if (i > 0)
            ok = ok && ratio[i] <= ratio[i - 1] * 1.05;
    }
    return {ok, "ratio=" + list(ratio) + " (bound 2, non-increasing within 5%); corrected-coefficient ratio=" +
                    list(corrected)};
}

// 3: upper-branch norm remainder at lambda = 0.5
Outcome c3()
{
    std::vector<double> ratio;
    bool ok = true;
    for (double eps : {0.01, 0.005, 0.002}) {
        const auto sols = find_solutions(ModelParams(eps, 0.5));
        if (sols.empty())
            return {false, "no solution at eps=" + fmt("%g", eps)};
        const double r = std::abs(sols.back().profile.norm2 - norm_upper(eps, 0.5)) /
                         (std::pow(eps, 1.5) * std::abs(std::log(eps)));
        ratio.push_back(r);
        ok = ok && r <= 1.0;
    }
    return {ok, "ratio=" + list(ratio) + " (bound 1)"};
}

// 4: point B
Outcome c4()
{
    const double n2 = type2_orbit().norm2;
    const auto sols = find_solutions(ModelParams(0.0, 1e-4));
    if (sols.empty())
        return {false, "no eps = 0 solution at lambda = 1e-4"};
    const double nb = sols.back().profile.norm2;
    const bool ok = std::abs(n2 - 2.0 / 3.0) <= 1e-15 && std::abs(nb - 2.0 / 3.0) <= 1e-3;
    return {ok, "type II norm=" + fmt("%.17g", n2) + ", eps=0 upper norm at lambda=1e-4: " + fmt("%.10g", nb) +
                    " (|diff| " + fmt("%.3g", std::abs(nb - 2.0 / 3.0)) + " <= 1e-3)"};
}

// 5: K2 first integral
Outcome c5()
{
    double worst = 0.0;
    for (double dw : {1e-2, 1e-3, 1e-4})
        for (double u2_in : {5.0, 20.0})
            worst = std::max(worst, k2_passage(dw, 0.0, u2_in, {1e-10, 1e-10}).h_drift);
    return {worst <= 1e-8, "max relative drift=" + fmt("%.3g", worst) + " (bound 1e-8)"};
}

// 6: saddle eigenvalues from a central-difference Jacobian at (1, 0)
Outcome c6()
{
    const double h = 1e-6;
    auto f = [](double u, double w) { return rhs_K2({u, w, 0.0, 0.0}, 1.0); };
    const auto up = f(1 + h, 0), um = f(1 - h, 0), wp = f(1, h), wm = f(1, -h);
    const double a = (up[0] - um[0]) / (2 * h), b = (wp[0] - wm[0]) / (2 * h);
    const double c = (up[1] - um[1]) / (2 * h), d = (wp[1] - wm[1]) / (2 * h);
    const double tr = a + d, det = a * d - b * c;
    const double disc = std::sqrt(tr * tr / 4 - det);
    const double e1 = tr / 2 + disc, e2 = tr / 2 - disc;
    const double err = std::max(std::abs(e1 - std::sqrt(2.0)), std::abs(e2 + std::sqrt(2.0)));
    return {err <= 1e-10, "eigenvalues " + fmt("%.15g", e1) + ", " + fmt("%.15g", e2) + " (err " +
                              fmt("%.2g", err) + " <= 1e-10)"};
}

// 7: xi1 exit coordinate against the switchback expansion, delta = 1
Outcome c7()
{
    std::vector<double> ratio;
    bool ok = true;
    const double delta = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto tr = transition_K1(-2.0 / std::sqrt(3.0), eps, delta);
        const double r = std::abs(tr.xi1_out - xi1_out_expansion(delta, eps)) / (delta * eps);
        ratio.push_back(r);
        ok = ok && r <= 15.0;
    }
    return {ok, "|residual|/(delta eps)=" + list(ratio) + " (bound 15)"};
}

// 8: small-lambda slope law on the eps = 0 branch near B
Outcome c8()
{
    std::vector<double> C;
    for (double l : {1e-2, 1e-3, 1e-4}) {
        const auto sols = find_solutions(ModelParams(0.0, l));
        if (sols.empty())
            return {false, "no solution at lambda=" + fmt("%g", l)};
        C.push_back((sols.back().profile.w0 - (-1.0 + l * std::log(l))) / l);
    }
    bool ok = true;
    for (double c : C)
        ok = ok && std::abs(c) <= 2.0;
    ok = ok && std::abs(C[2] - C[1]) < std::abs(C[1] - C[0]);
    return {ok, "C=" + list(C, "%.6f") + " (|C| <= 2, successive differences shrinking)"};
}

// eps = 0 centre shot: lambda with half-length 1 at u~_min = m
double shooting_lambda_eps0(double m)
{
    const double theta = std::log(m);
    auto R = [theta](double l) { return center_residual(ModelParams(0.0, l), theta); };
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(
        R, 1e-8, 50.0, [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::abs(a); }, it);
    return 0.5 * (r.first + r.second);
}

// 9: quadrature oracle against eps = 0 shooting
Outcome c9()
{
    double worst = 0.0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        const double m = 0.02 + 0.96 * i / (n - 1);
        const auto q = type3_point(m);
        const double l = shooting_lambda_eps0(m);
        const double N = center_shot(ModelParams(0.0, l), std::log(m)).norm2;
        worst = std::max({worst, std::abs(l - q.lambda), std::abs(N - q.norm2)});
    }
    const double oracle = type3_fold().lambda;
    const auto folds = detect_folds(trace_branch(0.0));
    const double cont = lower_fold(folds, FoldKind::Upper);
    const bool ok = worst <= 1e-6 && std::abs(cont - oracle) <= 1e-6;
    return {ok, "max |d(lambda, norm2)|=" + fmt("%.3g", worst) + " over 50 points; fold quadrature=" +
                    fmt("%.12g", oracle) + " continuation=" + fmt("%.12g", cont)};
}

// 10: branch slope near the lower fold at eps = 0.01
Outcome c10()
{
    const double eps = 0.01;
    const double ls = lower_fold(detect_folds(trace_branch(eps)), FoldKind::Lower);
    const double d = upper_norm_slope(eps, ls * (1.0 + eps), 0.5 * eps * ls);
    const double a = fold_slope(eps);
    const double rel = std::abs(d - a) / std::abs(a);
    return {rel <= 0.2, "finite difference=" + fmt("%.5g", d) + " expansion=" + fmt("%.5g", a) +
                            " rel=" + fmt("%.3g", rel) + " (<= 0.2)"};
}

// 11: stationary point of the truncated bifurcation equation
Outcome c11()
{
    std::vector<double> rel;
    bool ok = true;
    for (double eps : {1e-2, 1e-3}) {
        const double r = std::abs(bifeq_argmax_numeric(eps) - bifeq_minimizer(eps)) / bifeq_minimizer(eps);
        rel.push_back(r);
        ok = ok && r <= 1e-12;
    }
    return {ok, "relative error=" + list(rel, "%.2g") + " (<= 1e-12)"};
}

// 12: stability pattern at mid-window, eps = 0.05
Outcome c12()
{
    const double eps = 0.05;
    const auto folds = detect_folds(trace_branch(eps));
    const ModelParams p(eps, 0.5 * (lower_fold(folds, FoldKind::Lower) + lower_fold(folds, FoldKind::Upper)));
    const auto sols = find_solutions(p);
    std::string got;
    std::vector<Stability> st;
    for (const auto& s : sols) {
        st.push_back(classify_stability(s.profile, p));
        got += std::string(got.empty() ? "" : "/") + to_string(st.back());
    }
    const bool ok = st.size() == 3 && st[0] == Stability::Stable && st[1] == Stability::Unstable &&
                    st[2] == Stability::Stable;
    return {ok, "lambda=" + fmt("%.8g", p.lambda()) + " pattern " + got};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only, known_red;
    app.add_option("--only", only, "Run a subset of criteria")->delimiter(',');
    app.add_option("--known-red", known_red, "Criteria expected to fail")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = {
        {1, "S-shape and fold count", 60, c1},
        {2, "lower-fold asymptotics", 300, c2},
        {3, "upper-branch norm", 60, c3},
        {4, "point B", 60, c4},
        {5, "K2 conserved quantity", 60, c5},
        {6, "saddle spectrum", 60, c6},
        {7, "xi1 exit switchback", 30, c7},
        {8, "small-lambda slope law", 60, c8},
        {9, "oracle equivalence", 120, c9},
        {10, "fold slope", 60, c10},
        {11, "bifurcation-equation stationary point", 60, c11},
        {12, "stability pattern", 60, c12},
    };
    const std::set<int> subset(only.begin(), only.end());
    std::set<int> failed;
    for (const auto& c : all) {
        if (!subset.empty() && !subset.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt > c.budget_s) {
            o.pass = false;
            o.detail += " [over time budget " + fmt("%g", c.budget_s) + " s]";
        }
        std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt);
        std::fflush(stdout);
        if (!o.pass)
            failed.insert(c.id);
    }
    std::printf("%zu/%zu criteria pass\n", (subset.empty() ? all.size() : subset.size()) - failed.size(),
                subset.empty() ? all.size() : subset.size());
    if (app.count("--known-red")) {
        std::set<int> expected(known_red.begin(), known_red.end());
        if (!subset.empty()) {
            std::set<int> tmp;
            for (int k : expected)
                if (subset.count(k))
                    tmp.insert(k);
            expected = tmp;
        }
        if (failed != expected) {
            std::printf("failing set differs from the known-red list\n");
            return 1;
        }
        return 0;
    }
    return static_cast<int>(failed.size());
}
