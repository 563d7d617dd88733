#pragma once

#include "errors.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace memsfold {

// lambda_* ~ 3/4 eps - (sqrt(3/2) + 9/8) eps^2 ln eps, the lower fold.
double lambda_star_lower(double eps);

// Upper-branch norm 2 (1 - (sqrt3/3) sqrt(eps/lambda) - 2 eps).
// Requires lambda >= 3/4 eps.
double norm_upper(double eps, double lambda);

struct Expansion {
    std::string name;
    double value = 0.0;
    std::string remainder;
    // false inside the O(eps) corridor around the lower fold, where only the
    // leading behaviour is meaningful
    bool valid = true;
};

Expansion norm_upper_expansion(double eps, double lambda);

// Exit coordinate xi_1 on the chart-K1 exit section for w = -2/sqrt3.
double xi1_out_expansion(double delta, double eps);

// Truncated bifurcation equation d_delta(dw).
template <class Real>
Real bifeq_delta(const Real& dw, const Real& eps)
{
    using std::log;
    using std::sqrt;
    if (!(dw > 0))
        throw DomainError("bifeq_delta: dw must be positive");
    const Real two = 2, three = 3;
    return -dw + (two * sqrt(two) / three) * eps * log(dw) + (sqrt(three) / two) * eps * log(eps);
}

// Stationary point (maximum) of bifeq_delta: (2 sqrt2 / 3) eps.
double bifeq_minimizer(double eps);

// lambda = eps (2/sqrt3 + d_delta*)^-2 at the stationary point.
double lambda_star_from_bifeq(double eps);

// d||u||^2/dlambda at the lower fold, three leading terms.
double fold_slope(double eps);

// Golden-section search for the minimum of a unimodal f on [a, b]; stops when
// the bracket is below tol relative to its midpoint.
template <class Real, class F>
Real golden_section_minimize(F&& f, Real a, Real b, const Real& tol, int max_iter = 10000)
{
    using std::abs;
    using std::sqrt;
    const Real invphi = (sqrt(Real(5)) - 1) / 2;
    Real c = b - invphi * (b - a);
    Real d = a + invphi * (b - a);
    Real fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter; ++i) {
        if (abs(b - a) <= tol * abs((a + b) / 2))
            break;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

// Golden-section argmax of bifeq_delta in extended precision, returned as double.
double bifeq_argmax_numeric(double eps, double rel_tol = 1e-20);

} // namespace memsfold
