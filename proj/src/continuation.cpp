#include "continuation.hpp"

#include "asymptotics.hpp"
#include "errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

namespace memsfold {

const char* to_string(Stability s) noexcept
{
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

struct Eval {
    double R;
    double N;
    double w0;
};

double clamp_theta(double eps, double theta)
{
    const double tmax = theta_max(eps);
    const double gap = 1e-13 * std::max(1.0, std::abs(tmax));
    return std::min(theta, tmax - gap);
}

Eval evaluate(double eps, double lambda, double theta, const ShootingOptions& sh)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(theta) || !(lambda > 0.0))
        return {nan, nan, nan};
    try {
        const CenterShot s = center_shot(ModelParams(eps, lambda), clamp_theta(eps, theta), sh);
        return {s.half_length - 1.0, s.norm2, s.w0};
    } catch (const IntegrationError&) {
        return {nan, nan, nan};
    }
}

// Continuation runs in the log-gap g = ln(theta_max - theta), which stays
// O(1)-smooth through the corner where the plateau forms.
double gap_of(double eps, double theta)
{
    return std::log(std::max(theta_max(eps) - theta, 1e-300));
}

double theta_of_gap(double eps, double g)
{
    return theta_max(eps) - std::exp(g);
}

Eval evaluate_g(double eps, double lambda, double g, const ShootingOptions& sh)
{
    return evaluate(eps, lambda, theta_of_gap(eps, g), sh);
}

using Fn2 = std::function<std::array<double, 2>(double, double)>;

// Damped Newton on a 2x2 system with a forward-difference Jacobian.
bool newton2(const Fn2& F, double& a, double& b, const ContinuationOptions& opt, int& iters,
             const std::function<bool(double, double)>& admissible)
{
    std::array<double, 2> f = F(a, b);
    auto nrm = [](const std::array<double, 2>& v) { return std::max(std::abs(v[0]), std::abs(v[1])); };
    for (iters = 0; iters < opt.max_newton; ++iters) {
        if (!std::isfinite(nrm(f)))
            return false;
        if (nrm(f) <= opt.newton_tol)
            return true;
        const double ha = std::max(opt.fd_rel * std::abs(a), opt.fd_floor);
        const double hb = std::max(opt.fd_rel * std::abs(b), opt.fd_floor);
        const auto fa = F(a + ha, b);
        const auto fb = F(a, b + hb);
        const double j11 = (fa[0] - f[0]) / ha, j12 = (fb[0] - f[0]) / hb;
        const double j21 = (fa[1] - f[1]) / ha, j22 = (fb[1] - f[1]) / hb;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            return false;
        const double da = -(j22 * f[0] - j12 * f[1]) / det;
        const double db = -(-j21 * f[0] + j11 * f[1]) / det;
        double t = 1.0;
        bool moved = false;
        for (int k = 0; k < 8; ++k, t *= 0.5) {
            const double an = a + t * da, bn = b + t * db;
            if (!admissible(an, bn))
                continue;
            const auto fn = F(an, bn);
            if (std::isfinite(nrm(fn)) && (nrm(fn) < nrm(f) || k == 7)) {
                a = an;
                b = bn;
                f = fn;
                moved = true;
                break;
            }
        }
        if (!moved)
            return false;
    }
    return nrm(f) <= opt.newton_tol;
}

BranchPoint make_point(double eps, double lambda, double theta, const Eval& e, double s)
{
    BranchPoint bp;
    bp.lambda = lambda;
    bp.eps = eps;
    bp.delta = lambda > 0.0 ? delta_of(eps, lambda) : 0.0;
    bp.theta = clamp_theta(eps, theta);
    bp.w0 = e.w0;
    bp.norm2 = e.N;
    bp.residual = e.R;
    bp.arclength = s;
    return bp;
}

// Polishes theta at fixed lambda.
bool polish_theta(double eps, double lambda, double& theta, const ContinuationOptions& opt)
{
    for (int it = 0; it < opt.max_newton; ++it) {
        const double r = evaluate(eps, lambda, theta, opt.shooting).R;
        if (std::abs(r) <= opt.newton_tol)
            return true;
        const double h = std::max(opt.fd_rel * std::abs(theta), opt.fd_floor);
        const double rp = evaluate(eps, lambda, theta + h, opt.shooting).R;
        const double d = (rp - r) / h;
        if (d == 0.0 || !std::isfinite(d))
            return false;
        theta = clamp_theta(eps, theta - r / d);
    }
    return std::abs(evaluate(eps, lambda, theta, opt.shooting).R) <= opt.newton_tol;
}

} // namespace

BranchStart lower_branch_start(double eps, double lambda0, const ShootingOptions& opt)
{
    if (!(lambda0 > 0.0))
        throw DomainError("lower_branch_start: lambda0 must be positive");
    const ModelParams p(eps, lambda0);
    const double tmax = theta_max(eps);
    // smallest gap with a sign change is the lower branch (u~_min closest to 1)
    const int n = 60;
    const double lo = std::log(1e-4 * lambda0), hi = std::log(10.0);
    double prev_th = tmax - std::exp(lo);
    double prev_r = center_residual(p, prev_th, opt);
    for (int i = 1; i <= n; ++i) {
        const double th = tmax - std::exp(lo + (hi - lo) * i / n);
        const double r = center_residual(p, th, opt);
        if ((r > 0.0) != (prev_r > 0.0))
            return {lambda0, refine_theta(p, th, prev_th, opt)};
        prev_th = th;
        prev_r = r;
    }
    throw ConvergenceError("lower_branch_start: no lower-branch solution found");
}

Branch trace_branch(double eps, const ContinuationOptions& opt)
{
    return trace_branch(eps, lower_branch_start(eps, 0.005, opt.shooting), opt);
}

Branch trace_branch(double eps, const BranchStart& start, const ContinuationOptions& opt)
{
    if (!(opt.h0 > 0.0))
        throw DomainError("trace_branch: h0 must be positive");
    if (eps < 0.0 || !(start.lambda > 0.0))
        throw DomainError("trace_branch: need eps >= 0 and lambda > 0");
    const auto& sh = opt.shooting;
    Branch br;
    br.eps = eps;

    double lam = start.lambda;
    double th = start.theta;
    if (!polish_theta(eps, lam, th, opt))
        throw ConvergenceError("trace_branch: start point does not satisfy the residual");
    double g = gap_of(eps, th);
    Eval cur = evaluate_g(eps, lam, g, sh);
    br.points.push_back(make_point(eps, lam, theta_of_gap(eps, g), cur, 0.0));

    // initial tangent from the implicit function theorem, oriented towards larger lambda
    double tl, tn, tg;
    {
        const double hl = std::max(opt.fd_rel * lam, opt.fd_floor);
        const double hg = std::max(opt.fd_rel * std::abs(g), opt.fd_floor);
        const Eval el = evaluate_g(eps, lam + hl, g, sh);
        const Eval eg = evaluate_g(eps, lam, g + hg, sh);
        const double Rl = (el.R - cur.R) / hl, Rg = (eg.R - cur.R) / hg;
        const double Nl = (el.N - cur.N) / hl, Ng = (eg.N - cur.N) / hg;
        const double dg = -Rl / Rg;
        const double dN = Nl + Ng * dg;
        const double len = std::hypot(1.0, dN);
        tl = 1.0 / len;
        tn = dN / len;
        tg = dg / len;
    }

    const double cos_max = std::cos(opt.max_turn_deg * M_PI / 180.0);
    double h = std::min(opt.h0, opt.h_max);
    double s = 0.0;
    double last_ds = h;
    while (s < opt.s_max && br.points.size() < opt.max_points) {
        const double lp = lam + h * tl;
        const double np = cur.N + h * tn;
        const double gp = g + h * tg;
        auto shrink = [&](const char* why) {
            h *= 0.5;
            if (h < opt.h_min) {
                br.truncated = true;
                br.diagnostic = why;
                return false;
            }
            return true;
        };
        if (!(lp > 0.0)) {
            if (eps == 0.0 && lam < 1e3 * opt.lambda_stop_eps0 && h * 0.5 < opt.h_min)
                break;
            if (!shrink("predictor left lambda > 0 at minimum step"))
                break;
            continue;
        }
        auto F = [&](double l, double gg) -> std::array<double, 2> {
            const Eval e = evaluate_g(eps, l, gg, sh);
            return {e.R, tl * (l - lp) + tn * (e.N - np)};
        };
        double l = lp, gn = gp;
        int iters = 0;
        const bool ok = newton2(F, l, gn, opt, iters, [&](double a, double) { return a > 0.0; });
        if (!ok) {
            if (!shrink("corrector failed at minimum step"))
                break;
            continue;
        }
        const Eval e = evaluate_g(eps, l, gn, sh);
        const double dl = l - lam, dn = e.N - cur.N;
        const double ds = std::hypot(dl, dn);
        const double cosang = ds > 0.0 ? (dl * tl + dn * tn) / ds : -1.0;
        // a large turn against a long previous chord is the secant lagging
        // the curve, not a branch jump; accept it once the step is short
        const bool sharp = cosang < cos_max;
        const bool lagging = sharp && cosang > 0.0 && ds <= 0.25 * last_ds;
        if (ds > 2.0 * h || (sharp && !lagging) || std::abs(e.R) > 10 * opt.newton_tol) {
            if (!shrink("step rejected at minimum step"))
                break;
            continue;
        }
        last_ds = ds;
        tl = dl / ds;
        tn = dn / ds;
        tg = (gn - g) / ds;
        s += ds;
        lam = l;
        g = gn;
        cur = e;
        br.points.push_back(make_point(eps, lam, theta_of_gap(eps, g), cur, s));
        if (lam > opt.lambda_max)
            break;
        if (eps == 0.0 && lam < opt.lambda_stop_eps0)
            break;
        if (sharp)
            h = std::max(0.5 * h, opt.h_min);
        else if (iters <= 3)
            h = std::min(1.5 * h, opt.h_max);
        else if (iters > 6)
            h = std::max(0.7 * h, opt.h_min);
    }
    return br;
}

bool solve_at_norm(double eps, double target, double& lambda, double& theta,
                   const ContinuationOptions& opt)
{
    auto F = [&](double l, double g) -> std::array<double, 2> {
        const Eval e = evaluate_g(eps, l, g, opt.shooting);
        return {e.R, e.N - target};
    };
    int iters = 0;
    double g = gap_of(eps, theta);
    const bool ok = newton2(F, lambda, g, opt, iters, [](double a, double) { return a > 0.0; });
    theta = theta_of_gap(eps, g);
    return ok;
}

std::vector<FoldPoint> detect_folds(const Branch& branch, const ContinuationOptions& opt)
{
    std::vector<FoldPoint> folds;
    const auto& P = branch.points;
    if (P.size() < 3)
        return folds;
    const double eps = branch.eps;
    for (std::size_t i = 1; i + 1 < P.size(); ++i) {
        const double d0 = P[i].lambda - P[i - 1].lambda;
        const double d1 = P[i + 1].lambda - P[i].lambda;
        if (!(d0 * d1 < 0.0))
            continue;
        const bool is_max = d0 > 0.0;
        const double Na = P[i - 1].norm2, Nb = P[i].norm2, Nc = P[i + 1].norm2;

        // quadratic interpolation in N for starting guesses
        auto lagrange = [&](double N, double ya, double yb, double yc) {
            const double la = (N - Nb) * (N - Nc) / ((Na - Nb) * (Na - Nc));
            const double lb = (N - Na) * (N - Nc) / ((Nb - Na) * (Nb - Nc));
            const double lc = (N - Na) * (N - Nb) / ((Nc - Na) * (Nc - Nb));
            return ya * la + yb * lb + yc * lc;
        };
        double last_l = P[i].lambda, last_t = P[i].theta;
        auto lambda_of_N = [&](double N, double& l, double& t) {
            l = lagrange(N, P[i - 1].lambda, P[i].lambda, P[i + 1].lambda);
            t = theta_of_gap(eps, lagrange(N, gap_of(eps, P[i - 1].theta), gap_of(eps, P[i].theta),
                                           gap_of(eps, P[i + 1].theta)));
            if (!solve_at_norm(eps, N, l, t, opt)) {
                l = last_l;
                t = last_t;
                if (!solve_at_norm(eps, N, l, t, opt))
                    return false;
            }
            last_l = l;
            last_t = t;
            return true;
        };
        auto objective = [&](double N) {
            double l, t;
            if (!lambda_of_N(N, l, t))
                return std::numeric_limits<double>::max();
            return is_max ? -l : l;
        };
        const double lo = std::min(Na, Nc), hi = std::max(Na, Nc);
        std::uintmax_t it = 200;
        const auto r = boost::math::tools::brent_find_minima(objective, lo, hi, 30, it);
        FoldPoint f;
        f.kind = is_max ? FoldKind::Upper : FoldKind::Lower;
        f.norm2 = r.first;
        double l, t;
        if (!lambda_of_N(r.first, l, t)) {
            l = P[i].lambda;
            t = P[i].theta;
        }
        f.lambda = l;
        f.theta = t;
        f.w0 = evaluate(eps, l, t, opt.shooting).w0;
        // central difference of lambda along N at the refined point
        const double eta = 1e-4 * (hi - lo);
        double lp, tp, lm, tm;
        lp = l, tp = t, lm = l, tm = t;
        const bool okp = solve_at_norm(eps, f.norm2 + eta, lp, tp, opt);
        const bool okm = solve_at_norm(eps, f.norm2 - eta, lm, tm, opt);
        if (okp && okm) {
            const double dldN = (lp - lm) / (2.0 * eta);
            f.dlambda_ds = dldN / std::hypot(1.0, dldN);
        } else {
            f.dlambda_ds = std::numeric_limits<double>::quiet_NaN();
        }
        f.index = i;
        folds.push_back(f);
    }
    return folds;
}

Branch with_folds(const Branch& branch, const std::vector<FoldPoint>& folds)
{
    Branch out = branch;
    out.points.clear();
    out.folds.clear();
    std::size_t k = 0;
    std::vector<FoldPoint> sorted = folds;
    std::sort(sorted.begin(), sorted.end(), [](const FoldPoint& a, const FoldPoint& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        // the fold lies between points i-1 and i+1; place it next to i on the correct side
        const auto& bp = branch.points[i];
        auto emit_fold = [&](const FoldPoint& f) {
            BranchPoint fp;
            fp.lambda = f.lambda;
            fp.eps = branch.eps;
            fp.delta = f.lambda > 0.0 ? delta_of(branch.eps, f.lambda) : 0.0;
            fp.theta = f.theta;
            fp.w0 = f.w0;
            fp.norm2 = f.norm2;
            fp.is_fold = true;
            FoldPoint g = f;
            g.index = out.points.size();
            out.points.push_back(fp);
            out.folds.push_back(g);
        };
        const bool here = k < sorted.size() && sorted[k].index == i;
        bool before = false;
        if (here && i > 0 && i + 1 < branch.points.size()) {
            const bool rising = branch.points[i + 1].norm2 > branch.points[i - 1].norm2;
            before = rising ? sorted[k].norm2 < bp.norm2 : sorted[k].norm2 > bp.norm2;
        }
        if (here && before)
            emit_fold(sorted[k++]);
        out.points.push_back(bp);
        if (here && !before)
            emit_fold(sorted[k++]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (i > 0)
            s += std::hypot(out.points[i].lambda - out.points[i - 1].lambda,
                            out.points[i].norm2 - out.points[i - 1].norm2);
        out.points[i].arclength = s;
    }
    return out;
}

double smallest_eigenvalue(const SolutionProfile& profile, const ModelParams& p, int n)
{
    if (n < 5)
        throw DomainError("smallest_eigenvalue: grid too small");
    const int m = n - 2;
    const double h = 2.0 / (n - 1);
    const double off = -1.0 / (h * h);
    std::vector<double> d(m);
    for (int j = 0; j < m; ++j) {
        const double x = -1.0 + (j + 1) * h;
        d[j] = 2.0 / (h * h) + forcing_du(profile.u_at(x), p);
    }
    // eigenvalue count below mu via the LDL^T pivot signs
    auto count_below = [&](double mu) {
        int c = 0;
        double q = 1.0;
        for (int j = 0; j < m; ++j) {
            q = d[j] - mu - (j > 0 ? off * off / q : 0.0);
            if (q == 0.0)
                q = -1e-300;
            if (q < 0.0)
                ++c;
        }
        return c;
    };
    double lo = *std::min_element(d.begin(), d.end()) - 2.0 * std::abs(off);
    double hi = *std::max_element(d.begin(), d.end()) + 2.0 * std::abs(off);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

Stability classify_stability(const SolutionProfile& profile, const ModelParams& p, const StabilityOptions& opt)
{
    const double h = 2.0 / (opt.n - 1);
    double fu_max = 0.0;
    for (int j = 0; j < opt.n; ++j)
        fu_max = std::max(fu_max, std::abs(forcing_du(profile.u_at(-1.0 + j * h), p)));
    // boundary-layer width 1/sqrt(|f_u|) must span a few cells
    if (fu_max > 0.0 && 1.0 / std::sqrt(fu_max) < 5.0 * h)
        return Stability::Unknown;
    const double mu = smallest_eigenvalue(profile, p, opt.n);
    if (mu > opt.threshold)
        return Stability::Stable;
    if (mu < -opt.threshold)
        return Stability::Unstable;
    return Stability::Unknown;
}

void annotate_stability(Branch& branch, const ContinuationOptions& opt, const StabilityOptions& sopt)
{
    for (auto& bp : branch.points) {
        if (!(bp.lambda > 0.0)) {
            bp.stability = Stability::Unknown;
            continue;
        }
        const ModelParams p(branch.eps, bp.lambda);
        try {
            const SolutionProfile prof = build_profile(p, bp.theta, opt.shooting);
            bp.stability = classify_stability(prof, p, sopt);
        } catch (const std::exception&) {
            bp.stability = Stability::Unknown;
        }
    }
}

Branch compute_branch(double eps, const ContinuationOptions& opt, bool classify)
{
    Branch br = trace_branch(eps, opt);
    br = with_folds(br, detect_folds(br, opt));
    if (classify)
        annotate_stability(br, opt);
    return br;
}

namespace {

FoldRow fold_row(double eps, const ContinuationOptions& opt)
{
    FoldRow row;
    row.eps = eps;
    try {
        if (!(eps > 0.0 && eps <= 0.1))
            throw DomainError("fold_report: eps must lie in (0, 0.1]");
        row.lambda_star_asymptotic = lambda_star_lower(eps);
        const Branch br = trace_branch(eps, opt);
        const auto folds = detect_folds(br, opt);
        bool have_lower = false, have_upper = false;
        for (const auto& f : folds) {
            if (f.kind == FoldKind::Lower && !have_lower) {
                row.lambda_star_numeric = f.lambda;
                have_lower = true;
            } else if (f.kind == FoldKind::Upper && !have_upper) {
                row.lambda_upper_numeric = f.lambda;
                have_upper = true;
            }
        }
        if (!have_lower || !have_upper)
            throw ConvergenceError("fold_report: branch does not show both folds");
        row.abs_error = std::abs(row.lambda_star_numeric - row.lambda_star_asymptotic);
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

} // namespace

double upper_norm_slope(double eps, double lambda, double half_width, const FindOptions& opt)
{
    if (!(half_width > 0.0 && lambda - half_width > 0.0))
        throw DomainError("upper_norm_slope: need 0 < half_width < lambda");
    const auto hi = find_solutions(ModelParams(eps, lambda + half_width), opt);
    const auto lo = find_solutions(ModelParams(eps, lambda - half_width), opt);
    if (hi.empty() || lo.empty())
        throw ConvergenceError("upper_norm_slope: no solution at a stencil point");
    return (hi.back().profile.norm2 - lo.back().profile.norm2) / (2.0 * half_width);
}

// One task per eps; rows keep the input order.
std::vector<FoldRow> fold_report(const std::vector<double>& eps_list, const ContinuationOptions& opt)
{
    std::vector<std::future<FoldRow>> jobs;
    jobs.reserve(eps_list.size());
    for (double eps : eps_list)
        jobs.push_back(std::async(std::launch::async, fold_row, eps, std::cref(opt)));
    std::vector<FoldRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs)
        rows.push_back(j.get());
    return rows;
}

} // namespace memsfold
