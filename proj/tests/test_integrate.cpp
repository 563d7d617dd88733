#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "errors.hpp"
#include "integrate.hpp"

#include <cmath>

using namespace memsfold;

TEST_CASE("exponential decay to tolerance")
{
    IntegratorOptions io;
    io.tol = {1e-12, 1e-12};
    auto rhs = [](double, const StateN<1>& y) { return StateN<1>{-y[0]}; };
    const auto tr = integrate<1>(rhs, {1.0}, 0.0, 5.0, {}, io);
    CHECK(tr.t_end() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(std::abs(tr.back()[0] - std::exp(-5.0)) < 1e-12);
}

TEST_CASE("dense output between nodes")
{
    IntegratorOptions io;
    io.tol = {1e-10, 1e-10};
    auto rhs = [](double t, const StateN<1>&) { return StateN<1>{std::cos(t)}; };
    const auto tr = integrate<1>(rhs, {0.0}, 0.0, 6.0, {}, io);
    double worst = 0;
    for (int i = 0; i <= 600; ++i) {
        const double t = 0.01 * i;
        worst = std::max(worst, std::abs(tr.at(t)[0] - std::sin(t)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("terminal event located on the interpolant")
{
    IntegratorOptions io;
    io.tol = {1e-12, 1e-12};
    // harmonic oscillator, u = cos t; first downward zero of u at pi/2
    auto rhs = [](double, const StateN<2>& y) { return StateN<2>{y[1], -y[0]}; };
    std::vector<EventSpec<2>> ev{{"zero", [](double, const StateN<2>& y) { return y[0]; }, EventDirection::Down, true}};
    const auto tr = integrate<2>(rhs, {1.0, 0.0}, 0.0, 10.0, ev, io);
    REQUIRE(tr.terminated());
    CHECK(std::abs(tr.terminal_event()->t - M_PI / 2) < 1e-10);
    CHECK(tr.terminal_event()->id == "zero");
}

TEST_CASE("direction filter skips crossings of the other sign")
{
    IntegratorOptions io;
    auto rhs = [](double, const StateN<2>& y) { return StateN<2>{y[1], -y[0]}; };
    std::vector<EventSpec<2>> ev{{"up", [](double, const StateN<2>& y) { return y[0]; }, EventDirection::Up, true}};
    const auto tr = integrate<2>(rhs, {1.0, 0.0}, 0.0, 10.0, ev, io);
    REQUIRE(tr.terminated());
    CHECK(std::abs(tr.terminal_event()->t - 1.5 * M_PI) < 1e-8);
}

TEST_CASE("backward integration")
{
    auto rhs = [](double, const StateN<1>& y) { return StateN<1>{y[0]}; };
    IntegratorOptions io;
    io.tol = {1e-12, 1e-12};
    const auto tr = integrate<1>(rhs, {1.0}, 0.0, -2.0, {}, io);
    CHECK(std::abs(tr.back()[0] - std::exp(-2.0)) < 1e-12);
}

TEST_CASE("step budget exhaustion raises IntegrationError")
{
    IntegratorOptions io;
    io.max_steps = 5;
    auto rhs = [](double, const StateN<2>& y) { return StateN<2>{y[1], -100.0 * y[0]}; };
    CHECK_THROWS_AS(integrate<2>(rhs, {1.0, 0.0}, 0.0, 100.0, {}, io), IntegrationError);
}

TEST_CASE("finite-time blow-up is reported with the last state")
{
    // y' = y^2, y(0) = 1 blows up at t = 1
    auto rhs = [](double, const StateN<1>& y) { return StateN<1>{y[0] * y[0]}; };
    try {
        integrate<1>(rhs, {1.0}, 0.0, 2.0, {}, {});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.t() < 1.0);
        CHECK(e.t() > 0.99);
        CHECK(e.state().size() == 1);
    }
}
