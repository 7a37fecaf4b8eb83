#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/stationarity.hpp"

using namespace hcopt;

namespace {

FunctionHandle quad1d(double center, std::string label = "sq") {
    return FunctionHandle::smooth(
        1, [center](const Vec& x) { return (x[0] - center) * (x[0] - center); },
        [center](const Vec& x) { return Vec{2.0 * (x[0] - center)}; }, std::move(label));
}

// (x - 1)^2 + gamma * |x|_0 on [-2, 2]
ProblemSpec l0_instance_1d(double gamma) {
    ProblemSpec p;
    p.base_cost = quad1d(1.0, "(x-1)^2");
    p.base_cost.lipschitz_hint = 6.0;
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({gamma}, TermRole::Objective)) p.objective_terms.push_back(t);
    return p;
}

ProblemSpec l0_instance_2d() {
    ProblemSpec p;
    p.base_cost = FunctionHandle::smooth(
        2, [](const Vec& x) { return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 0.2) * (x[1] - 0.2); },
        [](const Vec& x) { return Vec{2.0 * (x[0] - 1.0), 2.0 * (x[1] - 0.2)}; }, "quad");
    p.feasible_set = PolyhedralSet::box({-4.0, -4.0}, {4.0, 4.0});
    for (auto& t : build_l0({0.5, 0.5}, TermRole::Objective)) p.objective_terms.push_back(t);
    return p;
}

} // namespace

TEST_CASE("index partition classes and tolerance band") {
    ProblemSpec p;
    p.base_cost = FunctionHandle::constant(1, 0.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    HeavisideTerm t1;
    t1.multiplier = FunctionHandle::constant(1, 1.0);
    t1.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    HeavisideTerm t2 = t1;
    t2.inner = FunctionHandle::affine({1.0}, -1.0, "x-1");
    p.objective_terms = {t1, t2};

    IndexPartition part = partition(p, {0.0}, 1e-9);
    CHECK(part.k_zero == std::vector<int>{0});
    CHECK(part.k_neg == std::vector<int>{1});
    CHECK(part.k_pos.empty());

    // value inside the tolerance band classifies as zero
    HeavisideTerm t3 = t1;
    t3.inner = FunctionHandle::affine({1.0}, -0.5, "x-0.5");
    ProblemSpec q = p;
    q.objective_terms = {t3};
    IndexPartition part2 = partition(q, {0.5 + 1e-12}, 1e-9);
    CHECK(part2.k_zero == std::vector<int>{0});
}

TEST_CASE("l0 partition at a sparse anchor") {
    ProblemSpec p = l0_instance_2d();
    IndexPartition part = partition(p, {0.0, 3.0}, 1e-9);
    // coordinate 1: both terms zero-class; coordinate 2: one pos, one neg
    CHECK(part.k_zero == std::vector<int>{0, 1});
    CHECK(part.k_pos == std::vector<int>{2});
    CHECK(part.k_neg == std::vector<int>{3});
}

TEST_CASE("pulled-down problem for the l0 objective fixes the zero support") {
    ProblemSpec p = l0_instance_2d();
    Vec anchor = {0.0, 3.0};
    IndexPartition part = partition(p, anchor, 1e-7);
    PulledDownProblem pd = build_pulled_down(p, part, anchor);
    // rows x1 <= 0 and -x1 <= 0 plus the strict-side rows for x2
    int zero_rows = 0;
    for (const auto& c : pd.constraints)
        if (std::fabs(c.fn.eval(anchor)) < 1e-12) ++zero_rows;
    CHECK(zero_rows == 2);
    CHECK(pd.feasible(anchor, 1e-9));
    CHECK(!pd.functional_row.has_value());
    CHECK(reproduces_restricted_zero_problem(p, anchor));

    std::string why;
    ProblemSpec bad = p;
    bad.constraint_terms.push_back(p.objective_terms[0]);
    bad.budget = 10.0;
    CHECK(!reproduces_restricted_zero_problem(bad, anchor, &why));
}

TEST_CASE("no zero classes leaves only strict-side rows") {
    ProblemSpec p = l0_instance_1d(0.5);
    IndexPartition part = partition(p, {1.0}, 1e-7);
    CHECK(part.k_zero.empty());
    PulledDownProblem pd = build_pulled_down(p, part, {1.0});
    for (const auto& c : pd.constraints) {
        double v = c.fn.eval({1.0});
        CHECK(std::fabs(v) > 0.5);
    }
}

TEST_CASE("linearized cone basics") {
    // X = [-1, 1], single zero-class row g = x at 0: cone {v <= 0}
    ProblemSpec p;
    p.base_cost = FunctionHandle::constant(1, 0.0);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, 1.0);
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    p.objective_terms = {t};
    IndexPartition part = partition(p, {0.0}, 1e-7);
    PulledDownProblem pd = build_pulled_down(p, part, {0.0});
    ConeResult cr = linearized_cone(pd, {0.0});
    CHECK(!cr.cone.inconclusive);
    CHECK(cr.acq == AcqEvidence::PiecewisePolyhedral);
    CHECK(pwl_cone_member({-0.5}, cr.cone.fixed, cr.cone.constraints));
    CHECK(!pwl_cone_member({0.5}, cr.cone.fixed, cr.cone.constraints));
}

TEST_CASE("nonsmooth active row gets piece rows") {
    // g = |x1| - x2 at (0,0): dd rows v1 - v2 <= 0 and -v1 - v2 <= 0
    ProblemSpec p;
    p.base_cost = FunctionHandle::constant(2, 0.0);
    p.feasible_set = PolyhedralSet::box({-1.0, -1.0}, {1.0, 1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(2, 1.0);
    t.inner = FunctionHandle::difference(
        FunctionHandle::abs_of(FunctionHandle::affine({1.0, 0.0}, 0.0, "x1")),
        FunctionHandle::affine({0.0, 1.0}, 0.0, "x2"));
    p.objective_terms = {t};
    Vec x0 = {0.0, 0.0};
    IndexPartition part = partition(p, x0, 1e-7);
    REQUIRE(part.k_zero == std::vector<int>{0});
    PulledDownProblem pd = build_pulled_down(p, part, x0);
    ConeResult cr = linearized_cone(pd, x0);
    CHECK(pwl_cone_member({0.3, 0.5}, cr.cone.fixed, cr.cone.constraints));  // |v1| <= v2
    CHECK(pwl_cone_member({-0.3, 0.5}, cr.cone.fixed, cr.cone.constraints));
    CHECK(!pwl_cone_member({0.5, 0.3}, cr.cone.fixed, cr.cone.constraints));
}

TEST_CASE("pseudo-B-stationarity certificates on the 1-D l0 instance") {
    ProblemSpec p = l0_instance_1d(0.5);
    Tolerances tol;

    // x = 1: no zero class, smooth dd = 0 in every direction
    StationarityCertificate c1 = check_pseudo_b_stationary(p, {1.0}, tol);
    CHECK(c1.verdict == Verdict::PseudoBStationary);
    CHECK(c1.min_dd >= -tol.tol_stat);

    // x = 0: support fixed at zero, cone collapses to {0}
    StationarityCertificate c0 = check_pseudo_b_stationary(p, {0.0}, tol);
    CHECK(c0.verdict == Verdict::PseudoBStationary);

    // x = 0.5: plain descent direction exists
    StationarityCertificate ch = check_pseudo_b_stationary(p, {0.5}, tol);
    CHECK(ch.verdict == Verdict::Fails);
    REQUIRE(ch.witness.size() == 1);
    CHECK(ch.min_dd < -tol.tol_stat);
    // witness descent: dd along the witness is negative
    CHECK(p.base_cost.dir_deriv({0.5}, ch.witness) < 0.0);

    CHECK_THROWS(check_pseudo_b_stationary(p, {5.0}, tol)); // outside X
}

TEST_CASE("functional constraint row appears only when tight") {
    // minimize (x-2)^2 s.t. 1*step(x-1) <= 0 on [0,3]: feasible x <= 1
    ProblemSpec p;
    p.base_cost = quad1d(2.0, "(x-2)^2");
    p.feasible_set = PolyhedralSet::box({0.0}, {3.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, 1.0);
    t.inner = FunctionHandle::affine({1.0}, -1.0, "x-1");
    p.constraint_terms = {t};
    p.budget = 0.0;

    StationarityCertificate c = check_pseudo_b_stationary(p, {1.0});
    CHECK(c.verdict == Verdict::PseudoBStationary);

    StationarityCertificate mid = check_pseudo_b_stationary(p, {0.5});
    CHECK(mid.verdict == Verdict::Fails);
}

TEST_CASE("multiplier families") {
    ProblemSpec p = l0_instance_1d(0.1);
    Tolerances tol;

    // all-zero multipliers reproduce the pulled-down problem: at x = 0 the
    // necessary check passes via that branch
    MultiplierReport nec = enumerate_multiplier_family(p, {0.0}, MultiplierMode::Necessary, tol);
    CHECK(nec.entries.size() == 4); // |K_=| = 2
    bool allzero_pass = false;
    for (const auto& e : nec.entries) {
        bool allzero = true;
        for (int b : e.xi) allzero = allzero && b == 0;
        if (allzero)
            allzero_pass =
                e.verdict == Verdict::PseudoBStationary || e.verdict == Verdict::LinearizedStationary;
    }
    CHECK(allzero_pass);
    CHECK(nec.aggregate_pass);

    // for-all aggregation fails: gamma = 0.1 makes x = 0 a non-minimum, and
    // the branch that drops both zero rows exposes the descent
    MultiplierReport suf = enumerate_multiplier_family(p, {0.0}, MultiplierMode::SufficientC, tol);
    CHECK(suf.entries.size() == 4);
    CHECK(!suf.aggregate_pass);
    CHECK(suf.precondition_ok); // multipliers are the positive weights

    // brute-force confirmation that x = 0 is not a local minimizer
    auto phi = [&](double x) {
        return (x - 1.0) * (x - 1.0) + (x != 0.0 ? 0.1 : 0.0);
    };
    bool found_better = false;
    for (double d = 1e-4; d <= 0.3; d += 1e-4)
        if (phi(d) < phi(0.0) - 1e-12) found_better = true;
    CHECK(found_better);

    CHECK_THROWS(enumerate_multiplier_family(p, {0.0}, MultiplierMode::Necessary, tol, 1));
}

TEST_CASE("sign condition checks") {
    Rng rng(99);
    // l0 weights: positive constants pass exactly
    ProblemSpec p = l0_instance_1d(0.5);
    SignConditionReport a = check_sign_conditions(p, SignMode::ZeroSet, rng);
    CHECK(a.all_pass());
    for (const auto& row : a.rows) CHECK(row.exact);

    // phi(x) = x, g(x) = x on [-1,1]: zero-set value 0 passes mode A,
    // sublevel mode B fails at x = -1
    ProblemSpec q;
    q.base_cost = FunctionHandle::constant(1, 0.0);
    q.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::affine({1.0}, 0.0, "x");
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    q.objective_terms = {t};
    SignConditionReport za = check_sign_conditions(q, SignMode::ZeroSet, rng);
    REQUIRE(za.rows.size() == 1);
    CHECK(za.rows[0].pass);
    CHECK(za.rows[0].exact);
    CHECK(za.rows[0].min_value == doctest::Approx(0.0));
    SignConditionReport zb = check_sign_conditions(q, SignMode::Sublevel, rng);
    CHECK(!zb.rows[0].pass);
    CHECK(zb.rows[0].min_value == doctest::Approx(-1.0));
}

TEST_CASE("sampled sign check on a three-piece boundary") {
    // multiplier psi2 - psi1 = 1 >= 0 on the nonsmooth zero set of a - f
    FunctionHandle f = FunctionHandle::abs_of(FunctionHandle::affine({1.0, 0.0}, 0.0, "x1"));
    FunctionHandle psi_diff = FunctionHandle::constant(2, 1.0);
    ProblemSpec q;
    q.base_cost = FunctionHandle::constant(2, 0.0);
    q.feasible_set = PolyhedralSet::box({-1.0, -1.0}, {1.0, 1.0});
    HeavisideTerm t;
    t.multiplier = psi_diff;
    t.inner = FunctionHandle::difference(FunctionHandle::constant(2, 0.5), f); // 0.5 - |x1|
    q.objective_terms = {t};
    Rng rng(5);
    SignConditionReport r = check_sign_conditions(q, SignMode::ZeroSet, rng);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].pass);
}

TEST_CASE("descent condition at infeasible points") {
    Tolerances tol;
    // budget constraint with linear multiplier: phi = 2 + 1.5 x, h = x
    ProblemSpec p;
    p.base_cost = quad1d(1.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::affine({1.5}, 2.0, "2+1.5x");
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    p.constraint_terms = {t};
    p.budget = 1.0;

    C4Report r = check_c4_sufficient(p, {{0.5}, {-1.0}}, tol);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].applicable); // phi(0.5) = 2.75 > 1
    CHECK(r.rows[0].pass);       // dd = 1.5 v, v = -1 gives -1.5 <= -1
    CHECK(!r.rows[1].applicable); // h(-1) < 0: pulled value 0 <= 1

    // constant multiplier has no descent
    ProblemSpec pc = p;
    pc.constraint_terms[0].multiplier = FunctionHandle::constant(1, 2.0);
    C4Report rc = check_c4_sufficient(pc, {{0.5}}, tol);
    CHECK(rc.rows[0].applicable);
    CHECK(!rc.rows[0].pass);
    CHECK(rc.rows[0].lp_value == doctest::Approx(0.0));
}

TEST_CASE("partition stability away from the zero band") {
    ProblemSpec p = l0_instance_2d();
    Vec x = {0.4, -0.7};
    double lip = 1.0; // unit coordinate inners
    double eps = 1e-7;
    IndexPartition base = partition(p, x, eps);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Vec h = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        double scale = (eps / (2 * lip)) / std::max(norm_inf(h), 1e-12);
        IndexPartition moved = partition(p, vsum(x, scaled(h, scale)), eps);
        CHECK(moved.k_pos == base.k_pos);
        CHECK(moved.k_neg == base.k_neg);
    }
}

TEST_CASE("blackbox objectives fall back to direction sampling") {
    ProblemSpec p;
    p.base_cost = FunctionHandle::blackbox(
        1, [](const Vec& x) { return std::floor(4.0 * x[0]) / 4.0 + 0.1 * x[0] * x[0]; });
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, 0.5);
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    p.objective_terms = {t};
    StationarityCertificate cert = check_pseudo_b_stationary(p, {0.5});
    CHECK(cert.method == CertMethod::DirectionSampling);
    // the positive claim is never made from samples alone
    CHECK(cert.verdict != Verdict::PseudoBStationary);
    CHECK(cert.verdict != Verdict::LinearizedStationary);
}
