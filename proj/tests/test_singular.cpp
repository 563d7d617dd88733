#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "errors.hpp"
#include "singular.hpp"

#include <cmath>

using namespace memsfold;

TEST_CASE("type II corner has norm 2/3")
{
    const auto o = type2_orbit();
    CHECK(o.kind == OrbitKind::TypeII);
    CHECK(std::abs(o.norm2 - 2.0 / 3.0) < 1e-15);
    CHECK(o.profile.u_at(0.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(o.profile.u_at(0.5) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("type I plateau norm is 2 - 4a/3 with ramp width a = sqrt3 delta / 2")
{
    for (double d : {0.0, 0.25, 0.5, 1.0}) {
        const double a = std::sqrt(3.0) * d / 2;
        CHECK(type1_orbit(d).norm2 == doctest::Approx(2.0 - 4.0 * a / 3.0).epsilon(1e-12));
    }
    CHECK(type1_orbit(0.5).norm2 == doctest::Approx(1.422649730810374).epsilon(1e-13));
    CHECK_THROWS_AS(type1_orbit(1.2), DomainError);
}

TEST_CASE("type III quadrature against its closed form")
{
    for (double m : {1e-4, 0.01, 0.3, 0.61165, 0.95, 0.9999})
        CHECK(type3_G(m) == doctest::Approx(type3_G_closed(m)).epsilon(1e-13));
}

TEST_CASE("type III fold")
{
    const auto f = type3_fold();
    REQUIRE(f.ok);
    CHECK(f.u_min == doctest::Approx(0.61165).epsilon(1e-4));
    CHECK(f.lambda == doctest::Approx(0.35000411934275).epsilon(1e-11));
    CHECK(f.norm2 == doctest::Approx(0.152913320359).epsilon(1e-9));
}

TEST_CASE("type III limits: flat as u_min -> 1, point B as u_min -> 0")
{
    const auto flat = type3_point(0.9999);
    CHECK(flat.lambda < 3e-4);
    CHECK(flat.norm2 < 1e-7);
    const auto nearB = type3_point(1e-8);
    CHECK(nearB.lambda < 1e-3);
    CHECK(nearB.norm2 == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("type III orbit profile carries the branch norm")
{
    const auto o = type3_orbit(0.5);
    CHECK(o.norm2 == doctest::Approx(type3_point(0.5).norm2).epsilon(1e-6));
    CHECK(o.profile.u_at(0.0) == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("diagram contains every arc")
{
    const auto d = singular_diagram(40);
    int b1 = 0, b2 = 0, b3 = 0, b = 0;
    for (const auto& p : d) {
        b1 += p.kind == "B1";
        b2 += p.kind == "B2";
        b3 += p.kind == "B3";
        b += p.kind == "B";
    }
    CHECK(b1 == 40);
    CHECK(b2 == 40);
    CHECK(b3 == 40);
    CHECK(b == 1);
    CHECK(type3_grid(40).size() == 40);
}
