#include "singular.hpp"

#include "errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace memsfold {

namespace {

using boost::math::quadrature::gauss_kronrod;

double gk(const std::function<double(double)>& f, double a, double b)
{
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &err);
    if (!std::isfinite(v) || err > 1e-10 * std::max(1.0, std::abs(v)))
        throw ConvergenceError("quadrature did not converge");
    return v;
}

// breakpoint-aware uniform sampling of a piecewise-linear even profile
SolutionProfile piecewise_linear(const std::vector<double>& bx, const std::vector<double>& bu,
                                 const std::vector<double>& bw, int n)
{
    SolutionProfile p;
    std::vector<std::pair<double, int>> xs; // x, segment
    for (int j = 0; j < n; ++j)
        xs.push_back({-1.0 + 2.0 * j / (n - 1), -1});
    for (std::size_t k = 0; k < bx.size(); ++k)
        xs.push_back({bx[k], static_cast<int>(k)});
    std::stable_sort(xs.begin(), xs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    // segments are [bx[2i], bx[2i+1]] carrying linear data; breakpoints come in pairs
    for (const auto& [x, tag] : xs) {
        if (tag >= 0) {
            p.x.push_back(x);
            p.u.push_back(bu[tag]);
            p.w.push_back(bw[tag]);
            continue;
        }
        // interior grid point: find the segment containing it
        for (std::size_t k = 0; k + 1 < bx.size(); k += 2) {
            if (x > bx[k] && x < bx[k + 1]) {
                p.x.push_back(x);
                p.u.push_back(bu[k] + bw[k] * (x - bx[k]));
                p.w.push_back(bw[k]);
                break;
            }
        }
    }
    return p;
}

} // namespace

const char* to_string(OrbitKind k) noexcept
{
    switch (k) {
    case OrbitKind::TypeI: return "I";
    case OrbitKind::TypeII: return "II";
    case OrbitKind::TypeIII: return "III";
    }
    return "?";
}

SingularOrbit type2_orbit(int n)
{
    SingularOrbit o;
    o.kind = OrbitKind::TypeII;
    o.profile = piecewise_linear({-1.0, 0.0, 0.0, 1.0}, {0.0, -1.0, -1.0, 0.0}, {-1.0, -1.0, 1.0, 1.0}, n);
    o.norm2 = 2.0 / 3.0;
    o.profile.norm2 = o.norm2;
    o.profile.w0 = -1.0;
    return o;
}

SingularOrbit type1_orbit(double delta, int n)
{
    const double dstar = 2.0 / std::sqrt(3.0);
    if (!(delta >= 0.0) || delta >= dstar)
        throw DomainError("type1_orbit: delta must lie in [0, 2/sqrt3)");
    SingularOrbit o;
    o.kind = OrbitKind::TypeI;
    o.delta = delta;
    const double a = 0.5 * std::sqrt(3.0) * delta; // ramp length
    // slope magnitude 2/(sqrt3 delta); infinite at delta = 0 (degenerate limit)
    const double s = delta > 0.0 ? 2.0 / (std::sqrt(3.0) * delta) : 0.0;
    o.profile = piecewise_linear({-1.0, -1.0 + a, -1.0 + a, 1.0 - a, 1.0 - a, 1.0},
                                 {0.0, -1.0, -1.0, -1.0, -1.0, 0.0},
                                 {-s, -s, 0.0, 0.0, s, s}, n);
    if (delta == 0.0) {
        // jumps at the walls: u = 0 only at x = -+1
        o.profile.x = {-1.0, -1.0, 1.0, 1.0};
        o.profile.u = {0.0, -1.0, -1.0, 0.0};
        o.profile.w = {0.0, 0.0, 0.0, 0.0};
    }
    o.norm2 = 2.0 * (1.0 - std::sqrt(3.0) * delta / 3.0);
    o.profile.norm2 = o.norm2;
    o.profile.w0 = -s;
    return o;
}

double type3_G(double m)
{
    if (!(m > 0.0 && m < 1.0))
        throw DomainError("type3_G: u_min must lie in (0, 1)");
    const double S = std::sqrt(1.0 / m - 1.0);
    const double I = gk([](double s) { return std::sqrt(1.0 + s * s); }, 0.0, S);
    return 2.0 * std::pow(m, 1.5) * I;
}

double type3_G_closed(double m)
{
    if (!(m > 0.0 && m < 1.0))
        throw DomainError("type3_G_closed: u_min must lie in (0, 1)");
    const double S = std::sqrt(1.0 / m - 1.0);
    return std::pow(m, 1.5) * (S * std::sqrt(1.0 + S * S) + std::asinh(S));
}

Type3BranchPoint type3_point(double m)
{
    Type3BranchPoint pt;
    pt.u_min = m;
    try {
        const double G = type3_G(m);
        pt.lambda = 0.5 * G * G;
        const double S = std::sqrt(1.0 / m - 1.0);
        const double J = gk(
            [m](double s) {
                const double q = 1.0 + s * s;
                const double d = m * q - 1.0;
                return d * d * std::sqrt(q);
            },
            0.0, S);
        pt.norm2 = 4.0 * std::pow(m, 1.5) / G * J;
    } catch (const std::exception& e) {
        pt.ok = false;
        pt.error = e.what();
    }
    return pt;
}

std::vector<Type3BranchPoint> type3_branch(const std::vector<double>& grid)
{
    std::vector<Type3BranchPoint> out;
    out.reserve(grid.size());
    for (double m : grid) {
        if (!(m > 0.0 && m < 1.0)) {
            Type3BranchPoint pt;
            pt.u_min = m;
            pt.ok = false;
            pt.error = "u_min outside (0, 1)";
            out.push_back(pt);
            continue;
        }
        out.push_back(type3_point(m));
    }
    return out;
}

SingularOrbit type3_orbit(double m, int n)
{
    const Type3BranchPoint pt = type3_point(m);
    if (!pt.ok)
        throw ConvergenceError("type3_orbit: " + pt.error);
    SingularOrbit o;
    o.kind = OrbitKind::TypeIII;
    o.lambda = pt.lambda;
    o.u_min = m;
    o.norm2 = pt.norm2;
    const double G = type3_G(m);
    const double S = std::sqrt(1.0 / m - 1.0);
    const double c = 2.0 * std::pow(m, 1.5) / G; // dx/ds = c sqrt(1+s^2)
    const double r2l = std::sqrt(2.0 * pt.lambda);
    const int half = std::max(2, (n - 1) / 2);
    std::vector<double> hx(half + 1), hu(half + 1), hw(half + 1);
    for (int j = 0; j <= half; ++j) {
        const double s = S * j / half;
        const double q = 1.0 + s * s;
        hx[j] = 0.5 * c * (s * std::sqrt(q) + std::asinh(s));
        hu[j] = m * q - 1.0;
        hw[j] = r2l * s / std::sqrt(m * q);
    }
    hx[half] = 1.0; // exact by construction of lambda
    auto& p = o.profile;
    for (int j = half; j >= 1; --j) {
        p.x.push_back(-hx[j]);
        p.u.push_back(hu[j]);
        p.w.push_back(-hw[j]);
    }
    for (int j = 0; j <= half; ++j) {
        p.x.push_back(hx[j]);
        p.u.push_back(hu[j]);
        p.w.push_back(hw[j]);
    }
    p.eps = 0.0;
    p.lambda = pt.lambda;
    p.norm2 = pt.norm2;
    p.w0 = p.w.front();
    return o;
}

Type3BranchPoint type3_fold()
{
    auto f = [](double m) { return -type3_point(m).lambda; };
    std::uintmax_t it = 500;
    const auto r = boost::math::tools::brent_find_minima(f, 0.01, 0.99, 50, it);
    return type3_point(r.first);
}

std::vector<double> type3_grid(int n)
{
    if (n < 2)
        throw DomainError("type3_grid: need n >= 2");
    const int nl = n / 2, nr = n - nl;
    std::vector<double> grid;
    for (int i = 0; i < nl; ++i)
        grid.push_back(1e-6 * std::pow(0.5 / 1e-6, static_cast<double>(i) / nl));
    for (int i = 0; i < nr; ++i)
        grid.push_back(1.0 - 0.5 * std::pow(1e-4 / 0.5, static_cast<double>(i) / std::max(1, nr - 1)));
    return grid;
}

std::vector<DiagramPoint> singular_diagram(int n)
{
    if (n < 2)
        throw DomainError("singular_diagram: need n >= 2");
    std::vector<DiagramPoint> out;
    const double dstar = 2.0 / std::sqrt(3.0);
    for (int i = 0; i < n; ++i) {
        // delta in (0, 2/sqrt3), open at both ends
        const double d = dstar * (i + 0.5) / n;
        out.push_back({"B1", d, 0.0, type1_orbit(d, 3).norm2});
    }
    for (int i = 1; i <= n; ++i) {
        const double l = static_cast<double>(i) / n;
        out.push_back({"B2", l, l, 2.0});
    }
    const auto grid = type3_grid(n);
    for (const auto& pt : type3_branch(grid))
        if (pt.ok)
            out.push_back({"B3", pt.u_min, pt.lambda, pt.norm2});
    out.push_back({"B", 0.0, 0.0, 2.0 / 3.0});
    return out;
}

} // namespace memsfold
