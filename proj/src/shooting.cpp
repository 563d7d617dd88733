#include "shooting.hpp"

#include "errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace memsfold {

namespace {

IntegratorOptions integrator_options(const ShootingOptions& opt)
{
    IntegratorOptions io;
    io.tol = opt.tol;
    io.max_steps = 5'000'000;
    return io;
}

// exp(theta) would be absorbed by eps long before this; cap the scan there.
double theta_floor(const ModelParams& p)
{
    const double eps = p.eps();
    const double lam = std::max(p.lambda(), 1e-300);
    if (eps > 0.0) {
        const double k = std::sqrt(2.0 * lam / (eps * eps * eps));
        return theta_max(eps) - (1.5 * k + 50.0);
    }
    return std::log(1e-3 * lam);
}

} // namespace

ShotResult shoot_half(const ModelParams& p, double w0, const ShootingOptions& opt)
{
    const double eps = p.eps();
    auto rhs = [&p](double, const StateN<3>& y) {
        return rhs_desingularized(StateShifted{y[0], y[1], y[2]}, p);
    };
    std::vector<EventSpec<3>> events;
    events.push_back({"turn", [](double, const StateN<3>& y) { return y[1]; }, EventDirection::Up, true});
    const double floor_u = eps > 0.0 ? eps : 0.0;
    events.push_back({"collapse", [floor_u](double, const StateN<3>& y) { return y[0] - floor_u; },
                      EventDirection::Down, true});

    ShotResult r;
    r.w0 = w0;
    if (w0 >= 0.0) {
        // w starts at or above the turning level: the shot turns immediately.
        r.turned = true;
        r.xi_at_turn = -1.0;
        r.u_at_turn = 1.0;
        r.half_profile.push_node(0.0, {1.0, w0, -1.0});
        return r;
    }
    r.half_profile = integrate<3>(rhs, StateN<3>{1.0, w0, -1.0}, 0.0, opt.max_pseudo_time, events,
                                  integrator_options(opt));
    const auto& term = r.half_profile.terminal_event();
    if (term && term->id == "turn") {
        r.turned = true;
        r.xi_at_turn = term->y[2];
        r.u_at_turn = term->y[0];
    }
    return r;
}

double residual(const ModelParams& p, double w0, const ShootingOptions& opt)
{
    const ShotResult r = shoot_half(p, w0, opt);
    return r.turned ? r.xi_at_turn : 1.0;
}

double theta_max(double eps)
{
    return eps > 0.0 ? std::log1p(-eps) : 0.0;
}

namespace {

struct CenterRhs {
    double eps;
    double lambda;
    double log1m_eps;

    StateN<3> operator()(double, const StateN<3>& y) const
    {
        const double pv = y[0];
        const double q = y[1];
        const double v = std::exp(pv);
        const double ut = eps + v;
        double force;
        if (eps == 0.0)
            force = lambda * std::exp(-3.0 * pv);
        else {
            const double u2 = ut * ut;
            force = lambda * (v + 2.0 * eps) / (u2 * u2);
        }
        // u~ - 1 without cancellation near the flat state
        const double dev = (1.0 - eps) * std::expm1(pv - log1m_eps);
        return {q, force - q * q, dev * dev};
    }
};

Trajectory<3> center_trajectory(const ModelParams& p, double theta, const ShootingOptions& opt)
{
    const double pmax = theta_max(p.eps());
    std::vector<EventSpec<3>> events;
    events.push_back({"edge", [pmax](double, const StateN<3>& y) { return y[0] - pmax; },
                      EventDirection::Up, true});
    return integrate<3>(CenterRhs{p.eps(), p.lambda(), theta_max(p.eps())}, StateN<3>{theta, 0.0, 0.0}, 0.0,
                        opt.max_half_length, events, integrator_options(opt));
}

} // namespace

CenterShot center_shot(const ModelParams& p, double theta, const ShootingOptions& opt)
{
    if (!std::isfinite(theta))
        throw DomainError("center_shot: theta must be finite");
    const double eps = p.eps();
    CenterShot s;
    s.theta = theta;
    s.u_min = eps + std::exp(theta);
    if (theta >= theta_max(eps)) {
        // flat profile at u~ = 1
        s.reached = true;
        s.half_length = 0.0;
        s.w0 = 0.0;
        s.norm2 = 0.0;
        return s;
    }
    if (p.lambda() == 0.0) {
        s.reached = false;
        s.half_length = opt.max_half_length;
        return s;
    }
    const auto traj = center_trajectory(p, theta, opt);
    const auto& y = traj.back();
    s.reached = traj.terminated();
    s.half_length = traj.t_end();
    const double v = std::exp(y[0]);
    s.w0 = -y[1] * v;
    s.norm2 = 2.0 * y[2];
    return s;
}

double center_residual(const ModelParams& p, double theta, const ShootingOptions& opt)
{
    return center_shot(p, theta, opt).half_length - 1.0;
}

SolutionProfile build_profile(const ModelParams& p, double theta, const ShootingOptions& opt)
{
    const double eps = p.eps();
    SolutionProfile prof;
    prof.eps = eps;
    prof.lambda = p.lambda();
    if (theta >= theta_max(eps)) {
        prof.x = {-1.0, 1.0};
        prof.u = {0.0, 0.0};
        prof.w = {0.0, 0.0};
        prof.norm2 = 0.0;
        return prof;
    }
    const auto traj = center_trajectory(p, theta, opt);
    if (!traj.terminated())
        throw ConvergenceError("build_profile: centre shot never reaches the boundary");
    const double L = traj.t_end();
    const auto& ts = traj.times();
    const auto& ys = traj.states();

    // half profile on [0, L], refined with dense-output midpoints, then
    // rescaled to [0, 1]; x is stretched so u'' = f(u) holds only when L = 1.
    std::vector<double> hx;
    std::vector<StateN<3>> hy;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i > 0) {
            const double tm = 0.5 * (ts[i - 1] + ts[i]);
            hx.push_back(tm);
            hy.push_back(traj.at(tm));
        }
        hx.push_back(ts[i]);
        hy.push_back(ys[i]);
    }
    const std::size_t n = hx.size();
    prof.x.resize(2 * n - 1);
    prof.u.resize(2 * n - 1);
    prof.w.resize(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::exp(hy[i][0]);
        const double xs = hx[i] / L;
        const double u = eps + v - 1.0;
        const double w = hy[i][1] * v * L; // d/dx after rescaling
        prof.x[n - 1 + i] = xs;
        prof.u[n - 1 + i] = u;
        prof.w[n - 1 + i] = w;
        prof.x[n - 1 - i] = -xs;
        prof.u[n - 1 - i] = u;
        prof.w[n - 1 - i] = -w;
    }
    prof.x.front() = -1.0;
    prof.x.back() = 1.0;
    prof.w0 = prof.w.front();
    const auto& yb = traj.back();
    prof.norm2 = 2.0 * yb[2];
    return prof;
}

double refine_theta(const ModelParams& p, double lo, double hi, const ShootingOptions& opt)
{
    auto f = [&](double th) { return center_residual(p, th, opt); };
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw DomainError("refine_theta: residual does not change sign");
    std::uintmax_t iters = 200;
    const double rtol = opt.root_tol;
    double best = lo, fbest = flo;
    auto g = [&](double th) {
        const double v = f(th);
        if (std::abs(v) < std::abs(fbest)) {
            best = th;
            fbest = v;
        }
        return v;
    };
    auto tol = [&](double a, double b) {
        return std::abs(fbest) <= 1e-3 * rtol || std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a));
    };
    if (std::abs(fhi) < std::abs(fbest)) {
        best = hi;
        fbest = fhi;
    }
    boost::math::tools::toms748_solve(g, lo, hi, flo, fhi, tol, iters);
    return best;
}
std::vector<Solution> find_solutions(const ModelParams& p, const FindOptions& opt)
{
    if (opt.n_seeds < 2)
        throw DomainError("find_solutions: need at least two seeds");
    std::vector<Solution> out;
    if (p.lambda() == 0.0) {
        out.push_back({theta_max(p.eps()), build_profile(p, theta_max(p.eps()), opt.shooting)});
        return out;
    }
    // seeds are log-spaced in the gap d = theta_max - theta, which covers the
    // lower branch (d ~ lambda/2) and the deep upper branch (d ~ k) alike
    const double tmax = theta_max(p.eps());
    const double d_hi = tmax - theta_floor(p);
    const double d_lo = std::min(1e-3 * p.lambda(), 1e-8);
    const double ld_lo = std::log(d_lo), ld_hi = std::log(d_hi);
    std::vector<double> th(opt.n_seeds), r(opt.n_seeds);
    for (int i = 0; i < opt.n_seeds; ++i) {
        const double d = std::exp(ld_lo + (ld_hi - ld_lo) * i / (opt.n_seeds - 1));
        th[i] = tmax - d;
        r[i] = center_residual(p, th[i], opt.shooting);
    }
    for (int i = 0; i + 1 < opt.n_seeds; ++i) {
        if (r[i] == 0.0 || (r[i] > 0.0) != (r[i + 1] > 0.0)) {
            const double hi = th[i], lo = th[i + 1];
            const double root = r[i] == 0.0 ? th[i] : refine_theta(p, lo, hi, opt.shooting);
            SolutionProfile prof = build_profile(p, root, opt.shooting);
            if (opt.w0_min && prof.w0 < *opt.w0_min)
                continue;
            if (opt.w0_max && prof.w0 > *opt.w0_max)
                continue;
            const bool dup = std::any_of(out.begin(), out.end(), [&](const Solution& s) {
                return std::abs(s.profile.w0 - prof.w0) <= opt.dedup_tol * std::max(1.0, std::abs(prof.w0));
            });
            if (!dup)
                out.push_back({root, std::move(prof)});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Solution& a, const Solution& b) { return a.profile.norm2 < b.profile.norm2; });
    return out;
}

} // namespace memsfold
