#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/lift.hpp"
#include "hcopt/oracle.hpp"

using namespace hcopt;

namespace {

FunctionHandle quad1d(double center, double lip) {
    FunctionHandle f = FunctionHandle::smooth(
        1, [center](const Vec& x) { return (x[0] - center) * (x[0] - center); },
        [center](const Vec& x) { return Vec{2.0 * (x[0] - center)}; }, "quad");
    f.lipschitz_hint = lip;
    f.declared_convex = true;
    return f;
}

ProblemSpec l0_regression() {
    ProblemSpec p;
    p.base_cost = quad1d(1.0, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({0.5}, TermRole::Objective)) p.objective_terms.push_back(t);
    return p;
}

HeavisideTerm open_term(FunctionHandle mult, FunctionHandle inner) {
    HeavisideTerm t;
    t.multiplier = std::move(mult);
    t.inner = std::move(inner);
    t.flavor = Flavor::Open;
    return t;
}

} // namespace

TEST_CASE("epigraph membership via the min-max inequality") {
    HeavisideTerm term = open_term(
        FunctionHandle::smooth(1, [](const Vec& x) { return x[0] * x[0]; },
                               [](const Vec& x) { return Vec{2 * x[0]}; }, "x^2"),
        FunctionHandle::affine({1.0}, 0.0, "x"));
    CHECK(epi_membership(1.0, {1.0}, term));   // t = phi, g > 0
    CHECK(epi_membership(0.0, {-1.0}, term));  // g < 0, t >= 0
    CHECK(!epi_membership(-0.1, {0.0}, term)); // min(max(0.1,0), max(0,0.1)) = 0.1 > 0
    CHECK(epi_membership(0.5, {-0.5}, term));
    CHECK(!epi_membership(0.5, {1.0}, term)); // t below the graph on g > 0

    // membership equals the direct epigraph definition on a grid (sign
    // condition holds: phi = x^2 >= 0)
    for (double t = -1.0; t <= 2.0; t += 0.125) {
        for (double x = -1.5; x <= 1.5; x += 0.125) {
            bool direct = t >= term.value({x});
            CHECK(epi_membership(t, {x}, term) == direct);
        }
    }
}

TEST_CASE("penalty choice from the lipschitz rule") {
    Rng rng(11);
    // c with hint 2, K = 3 terms each with hint 1, safety 1: 2 + 3*1 -> +1
    ProblemSpec p;
    p.base_cost = FunctionHandle::affine({2.0}, 0.0, "2x");
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    for (int k = 0; k < 3; ++k) {
        HeavisideTerm t = open_term(FunctionHandle::affine({1.0}, 0.5, "x+0.5"),
                                    FunctionHandle::affine({1.0}, -0.1 * k, "g"));
        p.objective_terms.push_back(t);
    }
    PenaltyChoice pc = choose_penalty(p, 1.0, rng);
    CHECK(pc.lambda == doctest::Approx(2.0 + 3.0 * 1.0 + 1.0));
    CHECK(pc.K == 3);
    CHECK(pc.estimates.size() == 4);

    // K = 0 with zero-cost: lambda = 1
    ProblemSpec zero;
    zero.base_cost = FunctionHandle::constant(1, 0.0);
    zero.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    PenaltyChoice pz = choose_penalty(zero, 2.0, rng);
    CHECK(pz.lambda == doctest::Approx(1.0));
}

TEST_CASE("lifted branch solve on the l0 instance") {
    ProblemSpec p = l0_regression();
    LiftResult lr = solve_lifted(p, 10.0, 64, {0.5});
    REQUIRE(lr.solved);
    CHECK(lr.branches.size() == 4);

    // branch-stationary candidates x = 1 (value 0.5) and x = 0 (value 1)
    // both appear among the outcomes; the best tuple is x = 1 (1-D scan of
    // the discontinuous objective gives 0.5 there, 1.0 at the origin)
    CHECK(lr.lifted_objective == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(lr.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    bool saw_origin = false;
    for (const auto& b : lr.branches)
        if (b.feasible && std::fabs(b.x[0]) < 1e-6 &&
            std::fabs(b.lifted_objective - 1.0) < 1e-6)
            saw_origin = true;
    CHECK(saw_origin);

    for (const auto& b : lr.branches) CHECK((b.feasible || !b.note.empty()));

    // recovery: t = pi exactly (same arithmetic on both sides), certificate passes
    CHECK(lr.recovered.t[0] == p.objective_terms[0].multiplier.eval(lr.x));
    CHECK(lr.recovered.t[1] == 0.0);
    StationarityCertificate cert = check_pseudo_b_stationary(p, lr.x);
    CHECK(cert.verdict == Verdict::PseudoBStationary);

    CHECK_THROWS(solve_lifted(p, 10.0, 2, {0.5})); // budget too small
}

TEST_CASE("single-branch plain NLP when no terms exist") {
    ProblemSpec p;
    p.base_cost = quad1d(0.4, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    LiftResult lr = solve_lifted(p, 1.0, 4, {-1.0});
    REQUIRE(lr.solved);
    CHECK(lr.branches.size() == 1);
    CHECK(lr.x[0] == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("auxiliary recovery values and case tags") {
    ProblemSpec p;
    p.base_cost = quad1d(0.0, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    HeavisideTerm t1 = open_term(FunctionHandle::affine({0.0}, 2.0, "2"),
                                 FunctionHandle::affine({1.0}, -1.0, "x-1"));
    p.objective_terms.push_back(t1);
    HeavisideTerm c1 = open_term(FunctionHandle::affine({0.0}, 1.0, "1"),
                                 FunctionHandle::affine({1.0}, 0.5, "x+0.5"));
    p.constraint_terms.push_back(c1);
    p.budget = 3.0;

    // x with g < 0: t recovered to 0 even from a slack t; the slack tag is
    // about the s side only, so this one reads AllEqual
    RecoverResult r1 = recover_auxiliary({0.0}, {0.7}, {1.0}, p);
    CHECK(r1.t[0] == 0.0);
    CHECK(r1.s[0] == 1.0); // h(0) = 0.5 > 0: s = phi exactly
    CHECK(r1.functional_value == doctest::Approx(1.0));
    CHECK(r1.tag == RecoverCase::AllEqual);
    RecoverResult r2 = recover_auxiliary({0.0}, {0.0}, {1.4}, p);
    CHECK(r2.tag == RecoverCase::FeasibleWithSlack);
    RecoverResult r3 = recover_auxiliary({0.0}, {0.0}, {1.0}, p);
    CHECK(r3.tag == RecoverCase::AllEqual);

    CHECK_THROWS(recover_auxiliary({0.0}, {-0.5}, {1.0}, p)); // not in the epigraph
}

TEST_CASE("weak penalty leaves an infeasible recovered point") {
    // minimize (x-1)^2 s.t. 2*step(x) <= 1 on [-2,2]: feasible x <= 0.
    ProblemSpec p;
    p.base_cost = quad1d(1.0, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    HeavisideTerm c1 = open_term(FunctionHandle::constant(1, 2.0),
                                 FunctionHandle::affine({1.0}, 0.0, "x"));
    p.constraint_terms.push_back(c1);
    p.budget = 1.0;

    LiftResult weak = solve_lifted(p, 0.5, 16, {0.5});
    REQUIRE(weak.solved);
    CHECK(!weak.recovered.functional_feasible); // x = 1 kept, penalty 0.5 too small
    CHECK(weak.x[0] == doctest::Approx(1.0).epsilon(1e-6));

    LiftResult strong = solve_lifted(p, 10.0, 16, {0.5});
    REQUIRE(strong.solved);
    CHECK(strong.recovered.functional_feasible);
    CHECK(strong.x[0] == doctest::Approx(0.0).epsilon(1e-6));
    StationarityCertificate cert = check_pseudo_b_stationary(p, strong.x);
    CHECK(cert.verdict == Verdict::PseudoBStationary);
}

TEST_CASE("tangent formula probe: equality cases") {
    Rng rng(271828);
    PolyhedralSet S = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm term = open_term(FunctionHandle::affine({1.0}, 1.0, "x+1"),
                                   FunctionHandle::affine({1.0}, 0.0, "x"));

    // f(x) > 0, t on the graph
    {
        Vec xb = {0.5};
        TangentProbeReport rep =
            tangent_formula_probe(term, S, term.multiplier.eval(xb), xb, 600, rng);
        CHECK(rep.case_name == "graph: f>0");
        CHECK(rep.equality_expected);
        CHECK(rep.pass);
        CHECK(rep.agreements == rep.samples);
    }
    // f(x) < 0: flat side
    {
        Vec xb = {-0.5};
        TangentProbeReport rep = tangent_formula_probe(term, S, 0.0, xb, 600, rng);
        CHECK(rep.case_name == "flat: f<0");
        CHECK(rep.pass);
    }
    // f = 0 < psi: boundary, PA data make the inclusion tight
    {
        Vec xb = {0.0};
        TangentProbeReport rep = tangent_formula_probe(term, S, 0.0, xb, 600, rng);
        CHECK(rep.case_name == "boundary: f=0<psi");
        CHECK(rep.pass);
        CHECK(rep.agreements == rep.samples);
    }
    // t above everything: full space
    {
        Vec xb = {-0.5};
        TangentProbeReport rep = tangent_formula_probe(term, S, 2.0, xb, 400, rng);
        CHECK(rep.case_name == "interior above: f!=0 or psi=0");
        CHECK(rep.pass);
    }
}

TEST_CASE("tangent formula probe: zero-zero corner and inclusion cases") {
    Rng rng(31415);
    PolyhedralSet S = PolyhedralSet::box({-1.0}, {1.0});
    // psi(x) = |x| (nonnegative, psi(0) = 0), f(x) = x
    HeavisideTerm term = open_term(
        FunctionHandle::abs_of(FunctionHandle::affine({1.0}, 0.0, "x")),
        FunctionHandle::affine({1.0}, 0.0, "x"));
    {
        Vec xb = {0.0};
        TangentProbeReport rep = tangent_formula_probe(term, S, 0.0, xb, 800, rng);
        CHECK(rep.case_name == "boundary: f=0=psi");
        CHECK(rep.equality_expected); // psi' = |v| >= 0 on the dd-zero set
        CHECK(rep.pass);
        CHECK(rep.agreements == rep.samples);
    }
    // between case: 0 < t < psi at f = 0: inclusion only
    HeavisideTerm term2 = open_term(FunctionHandle::affine({1.0}, 1.0, "x+1"),
                                    FunctionHandle::affine({1.0}, 0.0, "x"));
    {
        Vec xb = {0.0};
        TangentProbeReport rep = tangent_formula_probe(term2, S, 0.5, xb, 800, rng);
        CHECK(rep.case_name == "between: 0<t<psi, f=0");
        CHECK(!rep.equality_expected);
        CHECK(rep.pass);
        CHECK(rep.exact_only == 0);
    }
    // touching case: t = psi > 0 at f = 0
    {
        Vec xb = {0.0};
        TangentProbeReport rep = tangent_formula_probe(term2, S, 1.0, xb, 800, rng);
        CHECK(rep.case_name == "touching: t=psi>0, f=0");
        CHECK(rep.pass);
    }
    CHECK_THROWS(tangent_formula_probe(term2, S, -1.0, {0.0}, 10, rng)); // outside epi
}

TEST_CASE("lifted objective never increases under recovery") {
    ProblemSpec p = l0_regression();
    LiftResult lr = solve_lifted(p, 10.0, 64, {0.7});
    REQUIRE(lr.solved);
    auto lifted_value = [&](const Vec& x, const Vec& t, const Vec& s) {
        double v = p.base_cost.eval(x);
        for (double tk : t) v += tk;
        if (!s.empty()) {
            double agg = -p.budget;
            for (double sl : s) agg += sl;
            v += 10.0 * std::max(agg, 0.0);
        }
        return v;
    };
    double before = lifted_value(lr.x, lr.t, lr.s);
    double after = lifted_value(lr.x, lr.recovered.t, lr.recovered.s);
    CHECK(after <= before + 1e-12);
}

TEST_CASE("epi membership requires canonical terms") {
    HeavisideTerm closed;
    closed.multiplier = FunctionHandle::constant(1, 1.0);
    closed.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    closed.flavor = Flavor::Closed;
    CHECK_THROWS(epi_membership(1.0, {0.5}, closed));
}
