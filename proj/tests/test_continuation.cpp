#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "continuation.hpp"
#include "errors.hpp"
#include "singular.hpp"

#include <cmath>

using namespace memsfold;

namespace {
const FoldPoint* find_kind(const std::vector<FoldPoint>& f, FoldKind k)
{
    for (const auto& x : f)
        if (x.kind == k)
            return &x;
    return nullptr;
}
} // namespace

TEST_CASE("S-curve at eps = 0.05 has two folds")
{
    const Branch br = trace_branch(0.05);
    CHECK_FALSE(br.truncated);
    const auto folds = detect_folds(br);
    REQUIRE(folds.size() == 2);
    const auto* lo = find_kind(folds, FoldKind::Lower);
    const auto* hi = find_kind(folds, FoldKind::Upper);
    REQUIRE(lo);
    REQUIRE(hi);
    // frozen from this solver at two tolerance levels
    CHECK(hi->lambda == doctest::Approx(0.352005888).epsilon(1e-8));
    CHECK(lo->lambda == doctest::Approx(0.0532318586).epsilon(1e-8));
    CHECK(hi->norm2 < lo->norm2);
    // arclength is increasing and norm2 monotone along the S
    for (std::size_t i = 1; i < br.points.size(); ++i) {
        CHECK(br.points[i].arclength > br.points[i - 1].arclength);
        CHECK(br.points[i].norm2 > br.points[i - 1].norm2);
    }
}

TEST_CASE("eps = 0 fold matches the quadrature oracle")
{
    const auto folds = detect_folds(trace_branch(0.0));
    REQUIRE(folds.size() == 1);
    CHECK(folds[0].kind == FoldKind::Upper);
    CHECK(std::abs(folds[0].lambda - type3_fold().lambda) < 1e-9);
}

TEST_CASE("inserted folds are flagged")
{
    const Branch br = trace_branch(0.05);
    const auto folds = detect_folds(br);
    const Branch b2 = with_folds(br, folds);
    CHECK(b2.points.size() == br.points.size() + folds.size());
    int flagged = 0;
    for (const auto& p : b2.points)
        flagged += p.is_fold;
    CHECK(flagged == 2);
    for (const auto& f : b2.folds)
        CHECK(b2.points[f.index].is_fold);
}

TEST_CASE("smallest eigenvalue of the flat state is pi^2/4")
{
    // u = 0 at lambda = 0: -psi'' on (-1, 1), first Dirichlet eigenvalue pi^2 / 4
    SolutionProfile pr;
    for (int i = 0; i <= 100; ++i) {
        pr.x.push_back(-1.0 + 0.02 * i);
        pr.u.push_back(0.0);
        pr.w.push_back(0.0);
    }
    const ModelParams p(0.05, 0.0);
    CHECK(smallest_eigenvalue(pr, p) == doctest::Approx(M_PI * M_PI / 4).epsilon(1e-5));
    CHECK(classify_stability(pr, p) == Stability::Stable);
}

TEST_CASE("stability alternates across the folds")
{
    Branch br = compute_branch(0.05);
    int changes = 0;
    Stability last = Stability::Unknown;
    for (const auto& p : br.points) {
        if (p.stability == Stability::Unknown || p.is_fold)
            continue;
        if (last != Stability::Unknown && p.stability != last)
            ++changes;
        last = p.stability;
    }
    CHECK(changes == 2);
    CHECK(br.points.front().stability == Stability::Stable);
}

TEST_CASE("fold report keeps the input order and flags bad eps")
{
    const auto rows = fold_report({0.05, 0.5, 0.02});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(rows[2].ok);
    CHECK(rows[2].lambda_star_numeric == doctest::Approx(0.0180509484).epsilon(1e-8));
    CHECK(rows[0].abs_error == doctest::Approx(std::abs(rows[0].lambda_star_numeric - rows[0].lambda_star_asymptotic)));
}

TEST_CASE("solve_at_norm lands on the requested norm")
{
    double lambda = 0.2, theta = 0.0;
    const auto sols = find_solutions(ModelParams(0.05, 0.2));
    REQUIRE(sols.size() == 3);
    theta = sols[1].theta;
    REQUIRE(solve_at_norm(0.05, 0.5, lambda, theta));
    const auto s = center_shot(ModelParams(0.05, lambda), theta);
    CHECK(s.norm2 == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(s.half_length - 1.0) < 1e-8);
}

TEST_CASE("upper-branch slope near the lower fold at eps = 0.01")
{
    const double ls = 0.00836772808;
    const double d = upper_norm_slope(0.01, ls * 1.01, 0.005 * ls);
    CHECK(d > 70.0);
    CHECK(d < 95.0);
    CHECK_THROWS_AS(upper_norm_slope(0.01, 0.1, 0.2), DomainError);
}
