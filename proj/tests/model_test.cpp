#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/model.hpp"

using namespace hcopt;

namespace {

FunctionHandle one(int n) { return FunctionHandle::constant(n, 1.0); }

HeavisideTerm closed_term(FunctionHandle mult, FunctionHandle inner) {
    HeavisideTerm t;
    t.multiplier = std::move(mult);
    t.inner = std::move(inner);
    t.flavor = Flavor::Closed;
    return t;
}

double closed_value(const HeavisideTerm& t, const Vec& x) { return t.value(x); }

double rewritten_value(const RewriteResult& r, const Vec& x) {
    return r.constant_part.eval(x) + r.open_term_sign * r.open_term.value(x);
}

} // namespace

TEST_CASE("rewrite_closed reproduces the closed product") {
    HeavisideTerm t = closed_term(one(1), FunctionHandle::affine({1.0}, 0.0, "x"));
    RewriteResult r = rewrite_closed(t);
    CHECK(r.open_term_sign == -1.0);
    CHECK(r.open_term.flavor == Flavor::Open);

    CHECK(closed_value(t, {2.0}) == doctest::Approx(1.0));
    CHECK(r.open_term.value({2.0}) == doctest::Approx(0.0));
    CHECK(rewritten_value(r, {2.0}) == doctest::Approx(1.0));

    // boundary: closed indicator is on at 0, the open rewrite keeps the value
    CHECK(closed_value(t, {0.0}) == doctest::Approx(1.0));
    CHECK(rewritten_value(r, {0.0}) == doctest::Approx(1.0));

    HeavisideTerm t2 = closed_term(
        FunctionHandle::smooth(1, [](const Vec& x) { return x[0] * x[0]; },
                               [](const Vec& x) { return Vec{2 * x[0]}; }, "x^2"),
        FunctionHandle::affine({1.0}, -1.0, "x-1"));
    RewriteResult r2 = rewrite_closed(t2);
    CHECK(closed_value(t2, {0.5}) == doctest::Approx(0.0));
    CHECK(rewritten_value(r2, {0.5}) == doctest::Approx(0.0));
    // direct evaluation of both sides on a sample grid
    for (double x = -2.0; x <= 2.0; x += 0.03125)
        CHECK(closed_value(t2, {x}) == doctest::Approx(rewritten_value(r2, {x})));

    CHECK_THROWS(rewrite_closed(r2.open_term));
}

TEST_CASE("build_l0 realizes the weighted support size") {
    auto terms = build_l0({1.0, 1.0}, TermRole::Objective);
    REQUIRE(terms.size() == 4);
    Vec x = {0.0, 3.0};
    Vec vals;
    double total = 0.0;
    for (const auto& t : terms) {
        vals.push_back(t.value(x));
        total += t.value(x);
    }
    CHECK(vals == Vec{0.0, 0.0, 1.0, 0.0});
    CHECK(total == doctest::Approx(1.0));

    auto terms2 = build_l0({2.0, 0.5}, TermRole::Constraint);
    double s2 = 0.0;
    for (const auto& t : terms2) s2 += t.value({-1.0, 0.0});
    CHECK(s2 == doctest::Approx(2.0));

    auto terms3 = build_l0({1.0}, TermRole::Objective);
    double s3 = 0.0;
    for (const auto& t : terms3) s3 += t.value({0.0});
    CHECK(s3 == doctest::Approx(0.0));

    CHECK_THROWS(build_l0({-1.0}, TermRole::Objective));
    // zero weights contribute no terms
    CHECK(build_l0({0.0, 1.0}, TermRole::Objective).size() == 2);
}

TEST_CASE("build_l0 equals the weighted l0 norm on random points") {
    Rng rng(42);
    Vec w = {0.7, 1.3, 0.2};
    auto terms = build_l0(w, TermRole::Objective);
    for (int trial = 0; trial < 200; ++trial) {
        Vec x(3);
        for (auto& xi : x) {
            double u = rng.uniform01();
            xi = u < 0.4 ? 0.0 : rng.uniform(-2, 2); // sparse samples included
        }
        double via_terms = 0.0;
        for (const auto& t : terms) via_terms += t.value(x);
        double direct = 0.0;
        for (int i = 0; i < 3; ++i) direct += x[i] != 0.0 ? w[i] : 0.0;
        CHECK(via_terms == doctest::Approx(direct));
    }
}

TEST_CASE("three-piece expansions agree with the case definition") {
    const int n = 1;
    FunctionHandle p1 = FunctionHandle::constant(n, 1.0);
    FunctionHandle p2 = FunctionHandle::constant(n, 2.0);
    FunctionHandle p3 = FunctionHandle::constant(n, 3.0);
    FunctionHandle f = FunctionHandle::affine({1.0}, 0.0, "x");
    const double a = 0.0, b = 1.0;

    auto mid = build_piecewise_region(p1, p2, p3, f, a, b, PiecewiseBoundary::ClosedMiddle);
    CHECK(mid.value({0.0}) == doctest::Approx(1.0));  // boundary f = a, middle closed
    CHECK(mid.value({-0.5}) == doctest::Approx(2.0));
    CHECK(mid.value({2.0}) == doctest::Approx(3.0));
    CHECK(mid.value({1.0}) == doctest::Approx(1.0));  // boundary f = b, middle closed

    auto right = build_piecewise_region(p1, p2, p3, f, a, b, PiecewiseBoundary::ClosedRight);
    CHECK(right.value({1.0}) == doctest::Approx(3.0)); // boundary f = b belongs to psi3
    CHECK(right.value({0.0}) == doctest::Approx(1.0)); // boundary f = a belongs to psi1
    CHECK(right.value({-0.5}) == doctest::Approx(2.0));
    CHECK(right.value({2.0}) == doctest::Approx(3.0));

    auto case_value_mid = [&](double x) {
        if (x < a) return 2.0;
        if (x > b) return 3.0;
        return 1.0;
    };
    auto case_value_right = [&](double x) {
        if (x < a) return 2.0;
        if (x >= b) return 3.0;
        return 1.0;
    };
    for (double x = -2.0; x <= 2.0; x += 0.015625) {
        CHECK(mid.value({x}) == doctest::Approx(case_value_mid(x)));
        CHECK(right.value({x}) == doctest::Approx(case_value_right(x)));
    }
    // points placed exactly on the breaks
    CHECK(mid.value({a}) == doctest::Approx(case_value_mid(a)));
    CHECK(mid.value({b}) == doctest::Approx(case_value_mid(b)));
    CHECK(right.value({a}) == doctest::Approx(case_value_right(a)));
    CHECK(right.value({b}) == doctest::Approx(case_value_right(b)));

    CHECK_THROWS(build_piecewise_region(p1, p2, p3, f, 1.0, 0.0, PiecewiseBoundary::ClosedMiddle));

    // infinite endpoints drop regions
    auto no_low = build_piecewise_region(p1, p2, p3, f, -INFINITY, b,
                                         PiecewiseBoundary::ClosedMiddle);
    CHECK(no_low.value({-100.0}) == doctest::Approx(1.0));
    CHECK(no_low.value({2.0}) == doctest::Approx(3.0));
    auto no_high = build_piecewise_region(p1, p2, p3, f, a, INFINITY,
                                          PiecewiseBoundary::ClosedRight);
    CHECK(no_high.value({100.0}) == doctest::Approx(1.0));
    CHECK(no_high.value({-1.0}) == doctest::Approx(2.0));
}

TEST_CASE("indicator products") {
    FunctionHandle f = FunctionHandle::affine({1.0}, 0.0, "x");
    FunctionHandle g = FunctionHandle::affine({-1.0}, 1.0, "1-x");

    auto cc = build_indicator_product(f, g, IndicatorPair::ClosedClosed);
    REQUIRE(cc.size() == 1);
    CHECK(cc[0].flavor == Flavor::Closed);
    CHECK(cc[0].value({0.5}) == doctest::Approx(1.0));
    CHECK(cc[0].value({-0.1}) == doctest::Approx(0.0));
    CHECK(cc[0].value({1.5}) == doctest::Approx(0.0));

    auto co = build_indicator_product(f, g, IndicatorPair::ClosedOpen);
    REQUIRE(co.size() == 2);
    auto co_value = [&](double x) { return co[0].value({x}) + co[1].value({x}); };
    auto direct = [&](double x) {
        double fl = x, gl = 1.0 - x;
        return (fl >= 0.0 ? 1.0 : 0.0) * (gl > 0.0 ? 1.0 : 0.0);
    };
    CHECK(co_value(0.0) == doctest::Approx(1.0));
    CHECK(co_value(-0.1) == doctest::Approx(0.0));
    for (double x = -1.0; x <= 2.0; x += 0.03125)
        CHECK(co_value(x) == doctest::Approx(direct(x)));
}

TEST_CASE("on-off gating term") {
    FunctionHandle f = FunctionHandle::affine({1.0}, -1.0, "x-1");
    HeavisideTerm t = build_onoff(f);
    CHECK(t.flavor == Flavor::Closed);
    CHECK(t.dimension() == 2);
    CHECK(t.value({2.0, 1.0}) == doctest::Approx(1.0));
    CHECK(t.value({0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(t.value({0.0, 0.0}) == doctest::Approx(1.0)); // y*f = 0, closed flavor
}

TEST_CASE("sign classification builder") {
    FunctionHandle f = FunctionHandle::affine({1.0}, 0.0, "x");
    HeavisideTerm miss = build_sign_classification(f, +1.0, 0.1);
    CHECK(miss.value({0.05}) == doctest::Approx(1.0)); // inside the margin counts
    CHECK(miss.value({0.5}) == doctest::Approx(0.0));
    CHECK(miss.value({-1.0}) == doctest::Approx(1.0));
    CHECK_THROWS(build_sign_classification(f, 0.5));
}

TEST_CASE("canonicalization preserves values and leaves open terms only") {
    const int n = 2;
    ProblemSpec p;
    p.base_cost = FunctionHandle::smooth(
        n, [](const Vec& x) { return x[0] * x[0] + 0.3 * x[1]; },
        [](const Vec& x) { return Vec{2 * x[0], 0.3}; }, "c");
    p.feasible_set = PolyhedralSet::box({-2.0, -2.0}, {2.0, 2.0});
    p.budget = 1.0;

    HeavisideTerm tc = closed_term(FunctionHandle::affine({0.0, 1.0}, 0.5, "x2+0.5"),
                                   FunctionHandle::affine({1.0, -1.0}, 0.1, "x1-x2+0.1"));
    p.objective_terms.push_back(tc);
    for (auto& t : build_l0({1.0, 0.5}, TermRole::Objective)) p.objective_terms.push_back(t);
    HeavisideTerm kc = closed_term(FunctionHandle::constant(n, 0.7),
                                   FunctionHandle::affine({-1.0, 0.0}, 0.2, "0.2-x1"));
    p.constraint_terms.push_back(kc);
    p.validate();

    ProblemSpec q = canonicalize(p);
    q.validate();
    CHECK(is_canonical(q));
    CHECK(!is_canonical(p));

    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        Vec x = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(p.objective_value(x) == doctest::Approx(q.objective_value(x)).epsilon(1e-12));
        CHECK(p.functional_value(x) == doctest::Approx(q.functional_value(x)).epsilon(1e-12));
    }
}
