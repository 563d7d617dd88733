#include "asymptotics.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace memsfold {

double lambda_star_lower(double eps)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("lambda_star_lower: eps must lie in (0, 1)");
    return 0.75 * eps - (std::sqrt(1.5) + 9.0 / 8.0) * eps * eps * std::log(eps);
}

double norm_upper(double eps, double lambda)
{
    if (eps < 0.0 || !(lambda > 0.0) || lambda < 0.75 * eps)
        throw DomainError("norm_upper: requires lambda >= 3/4 eps > 0 or eps = 0 < lambda");
    return 2.0 * (1.0 - (std::sqrt(3.0) / 3.0) * std::sqrt(eps / lambda) - 2.0 * eps);
}

Expansion norm_upper_expansion(double eps, double lambda)
{
    Expansion e;
    e.name = "norm_upper";
    e.value = norm_upper(eps, lambda);
    e.remainder = "O(eps^1.5 ln eps)";
    e.valid = eps == 0.0 || lambda - lambda_star_lower(eps) > eps;
    return e;
}

double xi1_out_expansion(double delta, double eps)
{
    if (!(eps > 0.0) || delta < 0.0)
        throw DomainError("xi1_out_expansion: need eps > 0, delta >= 0");
    const double s3 = std::sqrt(3.0);
    return -1.0 + 0.5 * s3 * delta - (3.0 * s3 / 8.0) * delta * eps * std::log(eps);
}

double bifeq_minimizer(double eps)
{
    return 2.0 * std::sqrt(2.0) / 3.0 * eps;
}

double lambda_star_from_bifeq(double eps)
{
    const double dd = bifeq_delta(bifeq_minimizer(eps), eps);
    const double d = 2.0 / std::sqrt(3.0) + dd;
    return eps / (d * d);
}

double fold_slope(double eps)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("fold_slope: eps must lie in (0, 1)");
    const double s6 = std::sqrt(6.0);
    const double le = std::log(eps);
    return 8.0 / (9.0 * eps) + (2.0 / 9.0) * (9.0 + 4.0 * s6) * le +
           (5.0 / 36.0) * (59.0 + 24.0 * s6) * eps * le * le;
}

double bifeq_argmax_numeric(double eps, double rel_tol)
{
    using R = boost::multiprecision::cpp_bin_float_50;
    const R e = eps;
    // the stationary point is a maximum, so minimize the negative
    auto f = [&e](const R& dw) { return -bifeq_delta<R>(dw, e); };
    const R guess = R(bifeq_minimizer(eps));
    const R x = golden_section_minimize<R>(f, guess / 10, guess * 10, R(rel_tol));
    return static_cast<double>(x);
}

} // namespace memsfold
