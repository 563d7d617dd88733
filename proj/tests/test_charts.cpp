#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "charts.hpp"
#include "errors.hpp"

#include <cmath>
#include <set>
#include <string>

using namespace memsfold;

TEST_CASE("chart changes are mutually inverse")
{
    const K1State a{0.3, -1.1, -0.7, 0.2};
    const K1State b = kappa21(kappa12(a));
    CHECK(b.r1 == doctest::Approx(a.r1).epsilon(1e-14));
    CHECK(b.w1 == doctest::Approx(a.w1).epsilon(1e-14));
    CHECK(b.xi1 == doctest::Approx(a.xi1).epsilon(1e-14));
    CHECK(b.eps1 == doctest::Approx(a.eps1).epsilon(1e-14));
}

TEST_CASE("K2 Hamiltonian is conserved along the flow")
{
    const auto p = k2_passage(1e-3, 0.0, 20.0, {1e-10, 1e-10});
    CHECK(p.h_drift < 1e-8);
}

TEST_CASE("manifolds through the saddle")
{
    // w2^2 = 4/3 - 2/u2 + 2/(3 u2^3), the level set of the saddle
    CHECK(std::abs(w2_manifold(1.0, 1)) < 1e-15);
    CHECK(std::abs(w2_manifold(1.0, -1)) < 1e-15);
    CHECK(hamiltonian_K2(2.0, w2_manifold(2.0, -1)) == doctest::Approx(hamiltonian_K2(1.0, 0.0)).epsilon(1e-14));
    // K1 sees the same curve in eps1 = 1 / u2
    CHECK(w1_manifold(0.25, -1) == doctest::Approx(w2_manifold(4.0, -1)).epsilon(1e-15));
    CHECK(w1_manifold(0.0, -1) == doctest::Approx(-2.0 / std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("K1 transition matches its energy relation")
{
    const auto t = transition_K1(-2.0 / std::sqrt(3.0), 1e-3, 1.0);
    CHECK(t.w1_out == doctest::Approx(t.w1_closed).epsilon(1e-10));
    CHECK_THROWS_AS(transition_K1(0.5, 1e-3, 1.0), DomainError);
}

TEST_CASE("slope law near B")
{
    const auto r = solve_w0A(1e-3, 0.0);
    CHECK(r.leading == doctest::Approx(-1 + 1e-3 * std::log(1e-3)).epsilon(1e-15));
    // linear in w0: w0 = (-1 + 4 L) / (1 - 3 L), L = lambda ln lambda
    const double L = 1e-3 * std::log(1e-3);
    CHECK(r.w0 == doctest::Approx((-1 + 4 * L) / (1 - 3 * L)).epsilon(1e-14));
    CHECK(solve_w0A(0.0, 0.3).w0 == -1.0);
}

TEST_CASE("invariant suite: exactly the known disagreements fail")
{
    const auto rep = charts_check();
    std::set<std::string> failed;
    for (const auto& it : rep.items)
        if (!it.pass)
            failed.insert(it.name);
    const std::set<std::string> expected = {"u2out_linear_law_dw=0.001", "u2out_linear_law_dw=0.0001",
                                            "expint_log_slope"};
    CHECK(failed == expected);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.items.size() >= 10);
}

TEST_CASE("turning point after the saddle follows a square-root law")
{
    const double eps = 1e-5;
    for (double dw : {1e-3, 1e-4}) {
        const double u2 = k2_passage(dw, eps, 10.0).u2_out;
        const double pred = 1 + std::sqrt(2 / std::sqrt(3.0) * dw - eps);
        CHECK(u2 == doctest::Approx(pred).epsilon(5e-3));
    }
}
