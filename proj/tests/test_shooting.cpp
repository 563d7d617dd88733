#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "errors.hpp"
#include "shooting.hpp"
#include "singular.hpp"

#include <cmath>

using namespace memsfold;

TEST_CASE("theta_max is the flat solution")
{
    CHECK(theta_max(0.0) == 0.0);
    CHECK(theta_max(0.05) == doctest::Approx(std::log(0.95)).epsilon(1e-15));
    const auto s = center_shot(ModelParams(0.05, 0.2), theta_max(0.05));
    CHECK(s.norm2 == 0.0);
}

TEST_CASE("three solutions inside the fold window, one outside")
{
    const auto mid = find_solutions(ModelParams(0.05, 0.2026));
    REQUIRE(mid.size() == 3);
    // frozen from this solver; cross-checked below by the boundary shot
    CHECK(mid[0].profile.norm2 == doctest::Approx(0.016779402423194513).epsilon(1e-8));
    CHECK(mid[1].profile.norm2 == doctest::Approx(0.48492825094209496).epsilon(1e-8));
    CHECK(mid[2].profile.norm2 == doctest::Approx(1.2686298063878556).epsilon(1e-8));
    CHECK(find_solutions(ModelParams(0.05, 0.8)).size() == 1);
    CHECK(find_solutions(ModelParams(0.05, 0.01)).size() == 1);
}

TEST_CASE("boundary shot agrees with the centre shot on lower and middle branches")
{
    const ModelParams p(0.05, 0.2026);
    const auto sols = find_solutions(p);
    REQUIRE(sols.size() == 3);
    for (int i = 0; i < 2; ++i) {
        const double w0 = sols[i].profile.w0;
        const auto shot = shoot_half(p, w0);
        REQUIRE(shot.turned);
        CHECK(std::abs(shot.xi_at_turn) < 1e-8);
        CHECK(shot.u_at_turn == doctest::Approx(std::exp(sols[i].theta) + 0.05).epsilon(1e-7));
    }
}

TEST_CASE("boundary residual sentinel for collapsing shots")
{
    // a steep entry at small lambda drives u~ below eps before w turns
    const ModelParams p(0.05, 0.01);
    CHECK(residual(p, -50.0) == 1.0);
    CHECK_FALSE(shoot_half(p, -50.0).turned);
}

TEST_CASE("small-lambda lower branch is the linearised parabola")
{
    // u ~ lambda (x^2 - 1) / 2, ||u||^2 ~ 4 lambda^2 / 15
    const double l = 1e-3;
    const auto sols = find_solutions(ModelParams(0.05, l));
    REQUIRE(!sols.empty());
    CHECK(sols[0].profile.norm2 == doctest::Approx(4.0 * l * l / 15.0).epsilon(5e-3));
    CHECK(sols[0].profile.w0 == doctest::Approx(-l).epsilon(5e-3));
}

TEST_CASE("eps = 0 centre shot reproduces the quadrature oracle")
{
    for (double m : {0.1, 0.4, 0.61165, 0.9}) {
        const auto q = type3_point(m);
        // at eps = 0 the half-length scales like 1 / sqrt(lambda)
        const double L1 = center_shot(ModelParams(0.0, 1.0), std::log(m)).half_length;
        const double lambda = L1 * L1;
        CHECK(lambda == doctest::Approx(q.lambda).epsilon(1e-9));
        const auto s = center_shot(ModelParams(0.0, lambda), std::log(m));
        CHECK(std::abs(s.half_length - 1.0) < 1e-9);
        CHECK(s.norm2 == doctest::Approx(q.norm2).epsilon(1e-8));
    }
}

TEST_CASE("profile is even and meets the boundary conditions")
{
    const ModelParams p(0.05, 0.2026);
    const auto sols = find_solutions(p);
    REQUIRE(sols.size() == 3);
    const auto& pr = sols[1].profile;
    CHECK(pr.x.front() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pr.x.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pr.u.front()) < 1e-9);
    CHECK(std::abs(pr.u.back()) < 1e-9);
    CHECK(pr.u_at(0.37) == doctest::Approx(pr.u_at(-0.37)).epsilon(1e-10));
    CHECK(pr.w_at(0.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("w0 window filters the scan")
{
    FindOptions opt;
    opt.w0_max = -0.5;
    const auto sols = find_solutions(ModelParams(0.05, 0.2026), opt);
    CHECK(sols.size() == 2);
}
