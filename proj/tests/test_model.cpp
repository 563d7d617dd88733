#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "errors.hpp"
#include "model.hpp"

#include <cmath>

using namespace memsfold;

TEST_CASE("parameters validate and derive delta")
{
    CHECK_THROWS_AS(ModelParams(-0.1, 1.0), DomainError);
    CHECK_THROWS_AS(ModelParams(0.1, -1.0), DomainError);
    const ModelParams p(0.04, 0.25);
    CHECK(p.delta() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(ModelParams(0.04, 0.0).delta(), DomainError);
    CHECK(lambda_of(0.04, delta_of(0.04, 0.3)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ModelParams::from_delta(0.01, 0.5).lambda() == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("desingularized field is the original one times u~^4")
{
    const ModelParams p(0.05, 0.3);
    for (double u : {-0.9, -0.5, -0.1}) {
        const double w = -0.7, ut = 1 + u;
        const auto o = rhs_original(0.0, {u, w}, p);
        const auto d = rhs_desingularized({ut, w, 0.0}, p);
        const double s = std::pow(ut, 4);
        CHECK(d[0] == doctest::Approx(s * o[0]).epsilon(1e-14));
        CHECK(d[1] == doctest::Approx(s * o[1]).epsilon(1e-14));
        CHECK(d[2] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("rescaled field is the desingularized one in time delta t")
{
    const ModelParams p(0.02, 0.5);
    const double delta = p.delta();
    const StateShifted s{0.4, -1.3, 0.2};
    const auto d = rhs_desingularized(s, p);
    const auto r = rhs_rescaled(to_rescaled(s, p), p);
    CHECK(r[0] == doctest::Approx(delta * d[0]).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(delta * delta * d[1]).epsilon(1e-14));
    CHECK(r[2] == doctest::Approx(delta * d[2]).epsilon(1e-14));
    const auto back = to_shifted(to_rescaled(s, p), p);
    CHECK(back.w == doctest::Approx(s.w).epsilon(1e-15));
}

TEST_CASE("forcing vanishes on the saddle level and its derivative matches a difference")
{
    const ModelParams p(0.05, 0.3);
    CHECK(forcing(0.05 - 1.0, p) == doctest::Approx(0.0).scale(1.0));
    CHECK(forcing(0.0, p) == doctest::Approx(0.3 * (1 - 0.0025)).epsilon(1e-15));
    const double u = -0.6, h = 1e-6;
    CHECK(forcing_du(u, p) == doctest::Approx((forcing(u + h, p) - forcing(u - h, p)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("norm of a sampled parabola")
{
    // u = x^2 - 1, ||u||^2 = 16/15; the rule's h^4 term leaves ~6e-10
    SolutionProfile pr;
    const int n = 201;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        pr.x.push_back(x);
        pr.u.push_back(x * x - 1.0);
        pr.w.push_back(2.0 * x);
    }
    CHECK(norm_u2(pr) == doctest::Approx(16.0 / 15.0).epsilon(2e-9));
    CHECK(pr.u_at(0.3) == doctest::Approx(0.09 - 1.0).epsilon(1e-12));
    CHECK(pr.w_at(0.3) == doctest::Approx(0.6).epsilon(1e-10));
}
