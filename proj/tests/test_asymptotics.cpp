#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asymptotics.hpp"
#include "errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

using namespace memsfold;

TEST_CASE("lower fold law by hand")
{
    // 3/4 eps - (sqrt(3/2) + 9/8) eps^2 ln eps at eps = 0.01
    const double e = 0.01;
    const double v = 0.0075 - (1.2247448713915890 + 1.125) * 1e-4 * std::log(0.01);
    CHECK(lambda_star_lower(e) == doctest::Approx(v).epsilon(1e-15));
    CHECK(lambda_star_lower(0.01) == doctest::Approx(0.008582097502641096).epsilon(1e-14));
    CHECK_THROWS_AS(lambda_star_lower(0.0), DomainError);
}

TEST_CASE("upper norm law")
{
    CHECK(norm_upper(0.0, 0.3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(norm_upper(0.01, 0.5) == doctest::Approx(2.0 * (1 - std::sqrt(3.0) / 3 * std::sqrt(0.02) - 0.02)).epsilon(1e-15));
    CHECK_THROWS_AS(norm_upper(0.01, 0.005), DomainError);
    const auto ex = norm_upper_expansion(0.01, 0.5);
    CHECK(ex.valid);
    CHECK(ex.value == norm_upper(0.01, 0.5));
    CHECK_FALSE(norm_upper_expansion(0.01, 0.0086).valid);
}

TEST_CASE("fold slope at eps = 0.01")
{
    CHECK(fold_slope(0.01) == doctest::Approx(73.121037005557085).epsilon(1e-12));
}

TEST_CASE("exit coordinate expansion")
{
    const double s3 = std::sqrt(3.0);
    CHECK(xi1_out_expansion(0.0, 0.01) == -1.0);
    CHECK(xi1_out_expansion(1.0, 0.01) == doctest::Approx(-1 + s3 / 2 - 3 * s3 / 8 * 0.01 * std::log(0.01)).epsilon(1e-15));
}

TEST_CASE("bifurcation equation: stationary point is a maximum at (2 sqrt2 / 3) eps")
{
    const double eps = 1e-3, m = bifeq_minimizer(eps);
    CHECK(m == doctest::Approx(2 * std::sqrt(2.0) / 3 * eps).epsilon(1e-15));
    const double h = 1e-3 * m;
    CHECK(bifeq_delta(m, eps) > bifeq_delta(m + h, eps));
    CHECK(bifeq_delta(m, eps) > bifeq_delta(m - h, eps));
    CHECK_THROWS_AS(bifeq_delta(0.0, eps), DomainError);
    for (double e : {1e-2, 1e-3, 1e-4})
        CHECK(std::abs(bifeq_argmax_numeric(e) - bifeq_minimizer(e)) <= 1e-12 * bifeq_minimizer(e));
}

TEST_CASE("lambda at the stationary point tends to the lower fold law")
{
    const double e = 1e-4;
    CHECK(lambda_star_from_bifeq(e) == doctest::Approx(0.75 * e).epsilon(0.05));
}

TEST_CASE("golden section on a quadratic, double and extended precision")
{
    const double x = golden_section_minimize<double>([](double t) { return (t - 0.3) * (t - 0.3); }, 0.0, 1.0, 1e-10);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
    using R = boost::multiprecision::cpp_bin_float_50;
    const R xr = golden_section_minimize<R>([](const R& t) { return (t - R(1) / 3) * (t - R(1) / 3); }, R(0), R(1), R(1e-30));
    CHECK(std::abs(static_cast<double>(xr - R(1) / 3)) < 1e-25);
}
