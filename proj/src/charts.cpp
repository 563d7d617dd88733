#include "charts.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memsfold {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kWstar = 2.0 / kSqrt3;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

Vec4 rhs_K1(const K1State& s, double delta)
{
    return {s.r1 * s.w1, s.eps1 * (1.0 - s.eps1 * s.eps1), delta * s.r1, -s.eps1 * s.w1};
}

Vec4 rhs_K2(const K2State& s, double delta)
{
    const double u2 = s.u2 * s.u2;
    const double u4 = u2 * u2;
    return {u4 * s.w2, u2 - 1.0, delta * s.r2 * u4, 0.0};
}

Vec4 rhs_kappa1(const Kappa1State& s, double delta)
{
    const double d2 = delta * delta;
    return {s.r1 * s.w, s.lambda1 * (1.0 - d2 * d2 * s.lambda1 * s.lambda1), s.r1, -s.lambda1 * s.w};
}

K2State kappa12(const K1State& s)
{
    if (!(s.eps1 > 0.0))
        throw DomainError("kappa12: eps1 must be positive");
    return {1.0 / s.eps1, s.w1, s.xi1, s.r1 * s.eps1};
}

K1State kappa21(const K2State& s)
{
    if (!(s.u2 > 0.0))
        throw DomainError("kappa21: u2 must be positive");
    return {s.r2 * s.u2, s.w2, s.xi2, 1.0 / s.u2};
}

double w2_manifold(double u2, int sign)
{
    if (!(u2 >= 1.0))
        throw DomainError("w2_manifold: u2 must be >= 1");
    const double rad = 4.0 / 3.0 - 2.0 / u2 + 2.0 / (3.0 * u2 * u2 * u2);
    const double v = std::sqrt(std::max(rad, 0.0));
    return sign < 0 ? -v : v;
}

double w1_manifold(double eps1, int sign)
{
    if (!(eps1 >= 0.0 && eps1 <= 1.0))
        throw DomainError("w1_manifold: eps1 must lie in [0, 1]");
    const double rad = 4.0 / 3.0 - 2.0 * eps1 + 2.0 * eps1 * eps1 * eps1 / 3.0;
    const double v = std::sqrt(std::max(rad, 0.0));
    return sign < 0 ? -v : v;
}

double hamiltonian_K2(double u2, double w2)
{
    if (!(u2 > 0.0))
        throw DomainError("hamiltonian_K2: u2 must be positive");
    return 0.5 * w2 * w2 + 1.0 / u2 - 1.0 / (3.0 * u2 * u2 * u2);
}

K1Transition transition_K1(double w_init, double eps, double delta, double sigma, const Tolerance& tol)
{
    if (!(w_init < 0.0))
        throw DomainError("transition_K1: w_init must be negative");
    if (!(eps > 0.0 && eps < sigma && sigma < 1.0))
        throw DomainError("transition_K1: need 0 < eps < sigma < 1");
    // eps1-parametrized flow in t = ln eps1; r1 = eps / eps1 eliminated
    auto rhs = [eps, delta](double t, const StateN<2>& y) {
        const double e1 = std::exp(t);
        return StateN<2>{-e1 * (1.0 - e1 * e1) / y[0], -delta * eps / (e1 * y[0])};
    };
    IntegratorOptions io;
    io.tol = tol;
    const auto traj = integrate<2>(rhs, StateN<2>{w_init, -1.0}, std::log(eps), std::log(sigma), {}, io);
    K1Transition out;
    out.w1_out = traj.back()[0];
    out.xi1_out = traj.back()[1];
    const double rad = w_init * w_init + 2.0 * (eps - sigma) - (2.0 / 3.0) * (eps * eps * eps - sigma * sigma * sigma);
    if (!(rad >= 0.0))
        throw DomainError("transition_K1: orbit turns before the exit section");
    out.w1_closed = -std::sqrt(rad);
    return out;
}

W0A solve_w0A(double lambda, double delta)
{
    if (lambda < 0.0 || delta < 0.0)
        throw DomainError("solve_w0A: lambda and delta must be non-negative");
    W0A r;
    if (lambda == 0.0) {
        r.w0 = -1.0;
        r.leading = -1.0;
        return r;
    }
    const double L = std::log(lambda);
    const double d8 = std::pow(delta, 8);
    auto F = [&](double w) { return w + 1.0 - (4.0 + 3.0 * w) * lambda * L + (1.0 + w) * d8 * L / 288.0; };
    const double dF = 1.0 - 3.0 * lambda * L + d8 * L / 288.0;
    if (dF == 0.0 || !std::isfinite(dF))
        throw ConvergenceError("solve_w0A: singular derivative");
    r.leading = -1.0 + lambda * L;
    double w = r.leading;
    for (r.iterations = 0; r.iterations < 50; ++r.iterations) {
        const double f = F(w);
        if (std::abs(f) <= 1e-15 * std::max(1.0, std::abs(w)))
            break;
        w -= f / dF;
        if (!std::isfinite(w) || std::abs(w) > 1e6)
            throw ConvergenceError("solve_w0A: Newton diverged");
    }
    r.w0 = w;
    return r;
}

double w2_on_orbit(double u2, double dw, double eps)
{
    const double w0 = -kWstar + dw;
    const double rad = w0 * w0 + 2.0 * (eps - 1.0 / u2) - (2.0 / 3.0) * (eps * eps * eps - 1.0 / (u2 * u2 * u2));
    if (!(rad >= 0.0))
        throw DomainError("w2_on_orbit: orbit does not reach this u2");
    return -std::sqrt(rad);
}

K2Passage k2_passage(double dw, double eps, double u2_in, const Tolerance& tol)
{
    auto rhs = [](double, const StateN<3>& y) {
        const double u2 = y[0] * y[0];
        return StateN<3>{u2 * u2 * y[1], u2 - 1.0, u2 * u2};
    };
    const double w_in = w2_on_orbit(u2_in, dw, eps);
    std::vector<EventSpec<3>> ev;
    ev.push_back({"turn", [](double, const StateN<3>& y) { return y[1]; }, EventDirection::Up, true});
    IntegratorOptions io;
    io.tol = tol;
    const auto traj = integrate<3>(rhs, StateN<3>{u2_in, w_in, 0.0}, 0.0, 1e4, ev, io);
    if (!traj.terminated())
        throw IntegrationError("k2_passage: no turning point before the time cap", traj.t_end(),
                               {traj.back().begin(), traj.back().end()});
    K2Passage p;
    p.u2_out = traj.back()[0];
    p.integral = traj.back()[2];
    const double h0 = hamiltonian_K2(u2_in, w_in);
    double drift = 0.0;
    for (const auto& y : traj.states())
        drift = std::max(drift, std::abs(hamiltonian_K2(y[0], y[1]) - h0) / std::abs(h0));
    p.h_drift = drift;
    return p;
}

bool ChecksReport::all_pass() const
{
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.pass; });
}

ChecksReport charts_check(const ChartsCheckOptions& opt)
{
    ChecksReport rep;
    auto add = [&rep](std::string name, double measured, double threshold, bool pass, std::string detail) {
        rep.items.push_back({std::move(name), measured, threshold, pass, std::move(detail)});
    };
    IntegratorOptions tight;
    tight.tol = {1e-13, 1e-13};

    // blow-down invariants
    {
        const double eps = 0.01;
        const auto tr = integrate<4>(
            [](double, const StateN<4>& y) { return rhs_K1({y[0], y[1], y[2], y[3]}, 1.0); },
            StateN<4>{1.0, -kWstar + 0.01, -1.0, eps}, 0.0, 3.0, {}, tight);
        double d = 0.0;
        for (const auto& y : tr.states())
            d = std::max(d, std::abs(y[0] * y[3] - eps) / eps);
        add("k1_blowdown_invariant", d, 1e-12, d <= 1e-12, "max |r1 eps1 - eps| / eps");
    }
    {
        const double lam = 0.01;
        const auto tr = integrate<4>(
            [](double, const StateN<4>& y) { return rhs_kappa1({y[0], y[1], y[2], y[3]}, 0.8); },
            StateN<4>{1.0, -1.0, -1.0, lam}, 0.0, 3.0, {}, tight);
        double d = 0.0;
        for (const auto& y : tr.states())
            d = std::max(d, std::abs(y[0] * y[3] - lam) / lam);
        add("kappa1_blowdown_invariant", d, 1e-12, d <= 1e-12, "max |r1 lambda1 - lambda| / lambda");
    }
    // Hamiltonian along a K2 transit from u2 = 20 at the configured tolerance
    {
        const auto ps = k2_passage(1e-3, 0.0, 20.0, opt.tol);
        add("k2_hamiltonian_drift", ps.h_drift, 1e-8, ps.h_drift <= 1e-8, "relative drift, u2 = 20 to turning point");
    }
    // saddle spectrum from a central-difference Jacobian
    {
        const double h = 1e-4;
        auto f = [](double u, double w) { return rhs_K2({u, w, 0.0, 0.0}, 1.0); };
        const auto fu = f(1.0 + h, 0.0), fm = f(1.0 - h, 0.0), gw = f(1.0, h), gm = f(1.0, -h);
        const double a = (fu[0] - fm[0]) / (2 * h), b = (gw[0] - gm[0]) / (2 * h);
        const double c = (fu[1] - fm[1]) / (2 * h), d = (gw[1] - gm[1]) / (2 * h);
        const double tr = a + d, det = a * d - b * c;
        const double disc = std::sqrt(tr * tr / 4.0 - det);
        const double e1 = tr / 2.0 + disc, e2 = tr / 2.0 - disc;
        const double err = std::max(std::abs(e1 - std::sqrt(2.0)), std::abs(e2 + std::sqrt(2.0)));
        add("k2_saddle_eigenvalues", err, 1e-10, err <= 1e-10, "eigenvalues " + fmt(e1) + ", " + fmt(e2));
    }
    // manifold graphs agree under eps1 = 1/u2
    {
        double d = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double u2 = 1.0 + 0.1 * i;
            d = std::max(d, std::abs(w2_manifold(u2, -1) - w1_manifold(1.0 / u2, -1)));
        }
        add("manifold_graph_identity", d, 1e-14, d <= 1e-14, "max |w2(u2) - w1(1/u2)|");
    }
    // stable-manifold attraction from u2 = 10
    {
        const double u0 = 10.0;
        std::vector<EventSpec<2>> ev;
        ev.push_back({"near", [](double, const StateN<2>& y) { return std::abs(y[0] - 1.0) - 1e-4; },
                      EventDirection::Down, true});
        ev.push_back({"turn", [](double, const StateN<2>& y) { return y[1]; }, EventDirection::Up, true});
        const auto tr = integrate<2>(
            [](double, const StateN<2>& y) {
                const double u2 = y[0] * y[0];
                return StateN<2>{u2 * u2 * y[1], u2 - 1.0};
            },
            StateN<2>{u0, w2_manifold(u0, -1)}, 0.0, 1e3, ev, tight);
        const bool ok = tr.terminated() && tr.terminal_event()->id == "near";
        add("stable_manifold_attraction", std::abs(tr.back()[0] - 1.0), 1e-4, ok,
            ok ? "reached |u2-1| <= 1e-4 before w2 = 0" : "turned or stalled before the saddle");
    }
    // turning point after the saddle passage: linear law 1 + (13 sqrt3/9) dw - (13/6) eps
    {
        const double eps = 1e-5;
        for (double dw : {1e-3, 1e-4}) {
            const auto ps = k2_passage(dw, eps, 1.0 / opt.sections.sigma, opt.tol);
            const double lin = (13.0 * kSqrt3 / 9.0) * dw - (13.0 / 6.0) * eps;
            const double ratio = (ps.u2_out - 1.0) / lin;
            const double root = std::sqrt(std::max(kWstar * dw - eps, 0.0));
            add("u2out_linear_law_dw=" + fmt(dw), std::abs(ratio - 1.0), 0.10, std::abs(ratio - 1.0) <= 0.10,
                "u2_out-1 = " + fmt(ps.u2_out - 1.0) + ", linear law " + fmt(lin) + ", sqrt((2/sqrt3)dw - eps) = " +
                    fmt(root));
        }
    }
    // slope of the passage integral against ln dw
    {
        std::vector<double> xs, ys;
        for (double dw : {1e-3, 1e-4, 1e-5, 1e-6}) {
            const auto ps = k2_passage(dw, 0.0, 1.0 / opt.sections.sigma, tight.tol);
            xs.push_back(std::log(dw));
            ys.push_back(ps.integral);
        }
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double expected = -std::sqrt(2.0) / 2.0;
        const double rel = std::abs(slope / expected - 1.0);
        add("expint_log_slope", rel, 0.05, rel <= 0.05,
            "fitted slope " + fmt(slope) + " vs " + fmt(expected) + " (-sqrt2/4 = " + fmt(-std::sqrt(2.0) / 4.0) + ")");
    }
    // K1 transition reproduces the closed-form slope
    {
        const auto t = transition_K1(-kWstar, 0.01, 1.0, opt.sections.sigma);
        const double d = std::abs(t.w1_out - t.w1_closed);
        add("k1_transition_closed_form", d, 1e-10, d <= 1e-10, "|w1_out - closed form|");
    }
    return rep;
}

} // namespace memsfold
