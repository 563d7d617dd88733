#include "model.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memsfold {

ModelParams::ModelParams(double eps, double lambda) : eps_(eps), lambda_(lambda)
{
    if (!(eps >= 0.0) || !(lambda >= 0.0))
        throw DomainError("ModelParams: eps and lambda must be non-negative");
}

double ModelParams::delta() const
{
    if (!(lambda_ > 0.0))
        throw DomainError("delta is undefined for lambda == 0");
    return std::sqrt(eps_ / lambda_);
}

ModelParams ModelParams::from_delta(double eps, double delta)
{
    return ModelParams(eps, lambda_of(eps, delta));
}

Vec3 rhs_desingularized(const StateShifted& s, const ModelParams& p)
{
    const double u2 = s.u * s.u;
    const double u4 = u2 * u2;
    const double e = p.eps();
    return {u4 * s.w, p.lambda() * (u2 - e * e), u4};
}

Vec3 rhs_rescaled(const StateRescaled& s, const ModelParams& p)
{
    const double delta = p.delta();
    const double u2 = s.u * s.u;
    const double u4 = u2 * u2;
    const double e = p.eps();
    return {u4 * s.w, e * (u2 - e * e), delta * u4};
}

Vec2 rhs_original(double /*x*/, const StateOriginal& s, const ModelParams& p)
{
    if (!(s.u > -1.0))
        throw DomainError("rhs_original: u <= -1 is the touchdown singularity");
    return {s.w, forcing(s.u, p)};
}

StateRescaled to_rescaled(const StateShifted& s, const ModelParams& p)
{
    return {s.u, p.delta() * s.w, s.xi};
}

StateShifted to_shifted(const StateRescaled& s, const ModelParams& p)
{
    return {s.u, s.w / p.delta(), s.xi};
}

double delta_of(double eps, double lambda)
{
    if (!(eps >= 0.0))
        throw DomainError("delta_of: eps must be non-negative");
    if (!(lambda > 0.0))
        throw DomainError("delta_of: lambda must be positive");
    return std::sqrt(eps / lambda);
}

double lambda_of(double eps, double delta)
{
    if (!(eps >= 0.0))
        throw DomainError("lambda_of: eps must be non-negative");
    if (!(delta > 0.0))
        throw DomainError("lambda_of: delta must be positive");
    return eps / (delta * delta);
}

double forcing(double u, const ModelParams& p)
{
    const double s = 1.0 + u;
    const double inv2 = 1.0 / (s * s);
    const double e = p.eps();
    return p.lambda() * inv2 * (1.0 - e * e * inv2);
}

double forcing_du(double u, const ModelParams& p)
{
    const double s = 1.0 + u;
    const double inv = 1.0 / s;
    const double inv3 = inv * inv * inv;
    const double e = p.eps();
    return p.lambda() * (-2.0 * inv3 + 4.0 * e * e * inv3 * inv * inv);
}

namespace {

std::size_t locate(const std::vector<double>& x, double xq)
{
    if (x.size() < 2 || xq < x.front() - 1e-12 || xq > x.back() + 1e-12)
        throw DomainError("SolutionProfile: query outside the sampled interval");
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0)
        return 0;
    return std::min(i - 1, x.size() - 2);
}

} // namespace

double SolutionProfile::u_at(double xq) const
{
    const std::size_t i = locate(x, xq);
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * u[i] + h10 * h * w[i] + h01 * u[i + 1] + h11 * h * w[i + 1];
}

double SolutionProfile::w_at(double xq) const
{
    const std::size_t i = locate(x, xq);
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    return d00 * u[i] + d10 * w[i] + d01 * u[i + 1] + d11 * w[i + 1];
}

double norm_u2(const SolutionProfile& profile)
{
    const auto& x = profile.x;
    const std::size_t n = x.size();
    if (n < 2 || profile.u.size() != n || profile.w.size() != n)
        throw DomainError("norm_u2: profile needs at least two consistent samples");
    if (std::abs(x.front() + 1.0) > 1e-12 || std::abs(x.back() - 1.0) > 1e-12)
        throw DomainError("norm_u2: grid must cover [-1, 1]");

    // int f = h/2 (f_a + f_b) + h^2/12 (f'_a - f'_b) per cell
    double l1 = 0.0;
    double l2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = x[i + 1] - x[i];
        if (h < 0.0)
            throw DomainError("norm_u2: grid must be increasing");
        if (h == 0.0)
            continue; // repeated breakpoint: slope jump
        const double a = 1.0 + profile.u[i];
        const double b = 1.0 + profile.u[i + 1];
        const double da = profile.w[i];
        const double db = profile.w[i + 1];
        l1 += 0.5 * h * (a + b) + h * h / 12.0 * (da - db);
        l2 += 0.5 * h * (a * a + b * b) + h * h / 12.0 * (2 * a * da - 2 * b * db);
    }
    return 2.0 - 2.0 * l1 + l2;
}

} // namespace memsfold
