#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/continuation.hpp"
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
    // (x-1)^2 + 0.5|x|_0 on [-2, 2]
    ProblemSpec p;
    p.base_cost = quad1d(1.0, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({0.5}, TermRole::Objective)) p.objective_terms.push_back(t);
    return p;
}

// minimize (x-1)^2 s.t. (2 + 1.5x) * step(x) <= 1 on [-2, 2]; feasible x <= 0,
// solution x = 0. Iterates track the penalty shoulder where theta = 1/phi,
// so the zero-class theta sequence stalls near 1/2: a (C3) failure by design.
ProblemSpec shoulder_instance() {
    ProblemSpec p;
    p.base_cost = quad1d(1.0, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::affine({1.5}, 2.0, "2+1.5x");
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    p.constraint_terms = {t};
    p.budget = 1.0;
    return p;
}

// Two constraint terms: the shoulder term (2+x)*step(x) stalls at theta = 1/2
// as above, while (0.5+1.5x)*step(x+1) stays in the positive class and
// supplies the descent direction the strengthened penalty condition needs.
ProblemSpec c3fail_instance() {
    ProblemSpec p;
    p.base_cost = quad1d(1.0, 7.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {1.5});
    HeavisideTerm shoulder;
    shoulder.multiplier = FunctionHandle::affine({1.0}, 2.0, "2+x");
    shoulder.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    HeavisideTerm active;
    active.multiplier = FunctionHandle::affine({1.5}, 0.5, "0.5+1.5x");
    active.inner = FunctionHandle::affine({1.0}, 1.0, "x+1");
    p.constraint_terms = {shoulder, active};
    p.budget = 1.5;
    return p;
}

} // namespace

TEST_CASE("approximated objective values") {
    ProblemSpec p = l0_regression();
    ApproximatedObjective a =
        make_approximated_objective(p, {make_modified_hinge()}, {}, 0.0, 0.25);
    // far outside the supports both indicators saturate: value = c + 0.5
    double hi = make_modified_hinge().upper_end(0.25);
    double x_flat = 2.0 * hi + 0.5;
    CHECK(a.value({x_flat}) ==
          doctest::Approx((x_flat - 1.0) * (x_flat - 1.0) + 0.5).epsilon(1e-12));
    // at zero both halves contribute q: value = c + 2 * 0.5 * q
    double q = std::sqrt(0.25) / (1.0 + std::sqrt(0.25));
    CHECK(a.value({0.0}) == doctest::Approx(1.0 + 2.0 * 0.5 * q).epsilon(1e-12));
}

TEST_CASE("approximated dd collapses to the smooth formula on flat regions") {
    ProblemSpec p = l0_regression();
    ApproximatedObjective a =
        make_approximated_objective(p, {make_modified_hinge()}, {}, 0.0, 0.25);
    double hi = make_modified_hinge().upper_end(0.25);
    Vec x = {2.0 * hi + 0.5};
    CHECK(a.dd(x, {1.0}) == doctest::Approx(2.0 * (x[0] - 1.0)).epsilon(1e-12));
    CHECK(a.dd(x, {-1.0}) == doctest::Approx(-2.0 * (x[0] - 1.0)).epsilon(1e-12));
    // dd agrees with a one-sided fd oracle at kinks too
    Vec at_zero = {0.0};
    auto f = [&](const Vec& z) { return a.value(z); };
    CHECK(a.dd(at_zero, {1.0}) ==
          doctest::Approx(fd_dir_derivative_oracle(f, at_zero, {1.0})).epsilon(1e-5));
    CHECK(a.dd(at_zero, {-1.0}) ==
          doctest::Approx(fd_dir_derivative_oracle(f, at_zero, {-1.0})).epsilon(1e-5));
}

TEST_CASE("penalty contributes nothing below the budget") {
    ProblemSpec p = shoulder_instance();
    ApproximatedObjective a =
        make_approximated_objective(p, {}, {make_modified_hinge()}, 10.0, 0.25);
    Vec x = {-1.0}; // theta(h) = 0 here, aggregate = -1 < 0
    CHECK(a.constraint_aggregate(x) == doctest::Approx(-1.0));
    CHECK(a.value(x) == doctest::Approx(4.0));
    CHECK(a.dd(x, {1.0}) == doctest::Approx(-4.0)); // pure cost slope
}

TEST_CASE("inner solver reaches the projected minimizer of a smooth convex cost") {
    ProblemSpec p;
    p.base_cost = quad1d(0.7, 6.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    ApproximatedObjective a = make_approximated_objective(p, {}, {}, 0.0, 0.5);
    NlpObjective obj;
    obj.value = [&](const Vec& x) { return a.value(x); };
    obj.dd = [&](const Vec& x, const Vec& v) { return a.dd(x, v); };
    obj.direction_model = [&](const Vec& x) { return a.direction_model(x); };
    InnerReport r = inner_solve(obj, p.feasible_set, {}, {-1.5});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(0.7).epsilon(1e-4));

    // starting at the minimizer: immediate stop
    InnerReport r0 = inner_solve(obj, p.feasible_set, {}, {0.7});
    CHECK(r0.converged);
    CHECK(r0.iterations == 0);
}

TEST_CASE("inner solver terminates at a d-stationary point of a nonconvex objective") {
    // c(x) = (x^2 - 1)^2: stationary points -1, 0, 1
    ProblemSpec p;
    p.base_cost = FunctionHandle::smooth(
        1,
        [](const Vec& x) {
            double s = x[0] * x[0] - 1.0;
            return s * s;
        },
        [](const Vec& x) { return Vec{4.0 * x[0] * (x[0] * x[0] - 1.0)}; }, "doublewell");
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    ApproximatedObjective a = make_approximated_objective(p, {}, {}, 0.0, 0.5);
    NlpObjective obj;
    obj.value = [&](const Vec& x) { return a.value(x); };
    obj.dd = [&](const Vec& x, const Vec& v) { return a.dd(x, v); };
    obj.direction_model = [&](const Vec& x) { return a.direction_model(x); };
    InnerReport r = inner_solve(obj, p.feasible_set, {}, {0.3});
    CHECK(r.converged);
    // fd scan of the dd at the terminal point confirms approximate stationarity
    for (double v : {1.0, -1.0}) {
        double fd = fd_dir_derivative_oracle([&](const Vec& z) { return a.value(z); }, r.x, {v});
        CHECK(fd >= -1e-5);
    }
}

TEST_CASE("objective never increases along the accepted steps") {
    ProblemSpec p = l0_regression();
    ApproximatedObjective a =
        make_approximated_objective(p, {make_modified_hinge()}, {}, 0.0, 0.125);
    NlpObjective obj;
    obj.value = [&](const Vec& x) { return a.value(x); };
    obj.dd = [&](const Vec& x, const Vec& v) { return a.dd(x, v); };
    obj.direction_model = [&](const Vec& x) { return a.direction_model(x); };
    // track by wrapping value around the solver
    double last = a.value({-0.6});
    NlpObjective wrapped = obj;
    wrapped.value = [&](const Vec& x) { return a.value(x); };
    InnerReport r = inner_solve(wrapped, p.feasible_set, {}, {-0.6});
    CHECK(r.objective <= last + 1e-12);
}

TEST_CASE("continuation on the l0 regression reaches a certified point") {
    ProblemSpec p = l0_regression();
    ContinuationSchedule sched;
    sched.stages = 20;
    ContinuationTrace trace =
        run_continuation(p, {make_modified_hinge()}, {}, 0.0, sched, {-0.5});
    REQUIRE(!trace.stages.empty());
    CHECK(trace.x_converged);
    // brute-force candidates: x = 0 (value 1) and x = 1 (value 1.5)
    double xl = trace.limit[0];
    bool near_candidate = std::fabs(xl) < 1e-4 || std::fabs(xl - 1.0) < 1e-4;
    CHECK(near_candidate);
    StationarityCertificate cert = check_pseudo_b_stationary(p, trace.limit);
    CHECK(cert.verdict == Verdict::PseudoBStationary);

    // limit objective matches a grid local value
    GridSpec grid;
    grid.resolution = {400};
    auto locals = grid_local_minimizers(p, grid);
    double phi_limit = p.objective_value(trace.limit);
    bool matches = false;
    for (const auto& m : locals)
        if (std::fabs(p.objective_value(m) - phi_limit) <= 1e-4) matches = true;
    CHECK(matches);
}

TEST_CASE("stage values equal the exact penalized objective outside supports") {
    ProblemSpec p = l0_regression();
    ContinuationSchedule sched;
    sched.stages = 16;
    ContinuationTrace trace =
        run_continuation(p, {make_modified_hinge()}, {}, 0.0, sched, {-0.5});
    ApproxFamily fam = make_modified_hinge();
    int checked = 0;
    for (const auto& rec : trace.stages) {
        double g1 = rec.x[0], g2 = -rec.x[0];
        double lo = fam.lower_end(rec.delta), hi = fam.upper_end(rec.delta);
        auto outside = [&](double g) { return g <= -lo || g >= hi; };
        if (outside(g1) && outside(g2)) {
            CHECK(rec.objective == doctest::Approx(p.objective_value(rec.x)).epsilon(1e-10));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("weak penalty lets the limit go infeasible and the trace flags it") {
    ProblemSpec p = shoulder_instance();
    ContinuationSchedule sched;
    sched.stages = 16;
    // threshold is Lip_c = 6 (K = 0); lambda far below it
    ContinuationTrace trace =
        run_continuation(p, {}, {make_modified_hinge()}, 0.5, sched, {-0.5});
    CHECK(!trace.functional_feasible_at_limit);
    CHECK(trace.functional_value_at_limit > 1.0 + 1e-6);
    CHECK(trace.limit[0] > 1e-4); // stalled strictly on the infeasible side
    CHECK(!trace.note.empty());
}

TEST_CASE("conditions on a clean instance") {
    ProblemSpec p = l0_regression();
    ContinuationSchedule sched;
    sched.stages = 20;
    ContinuationTrace trace =
        run_continuation(p, {make_modified_hinge()}, {}, 0.0, sched, {-0.5});
    Rng rng(4);
    ConditionReport rep = diagnose_conditions(trace, p, rng);
    CHECK(rep.passed("C1")); // weights are positive constants
    CHECK(rep.passed("C2")); // affine inners
    CHECK(rep.passed("C3"));
    CHECK(rep.find("C4")->status == CondStatus::NotApplicable);
    CHECK(rep.passed("C5"));
}

TEST_CASE("c3-failing instance triggers the weak-pseudo path") {
    ProblemSpec p = c3fail_instance();
    ContinuationSchedule sched;
    sched.delta0 = 0.5;
    sched.rho = 0.5;
    sched.stages = 48;
    InnerStop stop;
    stop.max_iter = 600;
    ContinuationTrace trace =
        run_continuation(p, {}, {make_modified_hinge()}, 12.0, sched, {-0.5}, stop);
    CHECK(trace.functional_feasible_at_limit);
    CHECK(std::fabs(trace.limit[0]) <= 1e-6);
    REQUIRE(trace.zero_l.size() == 1); // the shoulder term only

    Rng rng(9);
    ConditionReport rep = diagnose_conditions(trace, p, rng);
    CHECK(rep.find("C3")->status == CondStatus::Fail);
    CHECK(rep.passed("C1"));
    CHECK(rep.passed("C2"));
    CHECK(rep.passed("C5"));

    WeakPseudoReport weak = weak_pseudo_report(trace, p);
    REQUIRE(weak.mu_star.size() == 1);
    CHECK(weak.mu_star[0] >= 0.0);
    CHECK(weak.mu_star[0] <= 1.0);
    CHECK(weak.mu_star[0] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(weak.weak_row_satisfied);
    CHECK(weak.weak_row_value <= 1.5 + 1e-6);
    // the positive-class term supplies the unit descent: 1.5v + [v]_+ at v=-1
    CHECK(weak.c4prime_pass);
    CHECK(weak.c5prime_pass);
    CHECK(weak.certificate.stationary());
}

TEST_CASE("families failing the axiom suite are rejected") {
    ProblemSpec p = l0_regression();
    ContinuationSchedule sched;
    CHECK_THROWS(run_continuation(p, {make_truncated_hinge()}, {}, 0.0, sched, {0.0}));
}
