#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/oracle.hpp"

using namespace hcopt;

namespace {

FunctionHandle quad1d(double center) {
    return FunctionHandle::smooth(
        1, [center](const Vec& x) { return (x[0] - center) * (x[0] - center); },
        [center](const Vec& x) { return Vec{2.0 * (x[0] - center)}; }, "quad");
}

ProblemSpec l0_instance() {
    // minimize (x-1)^2 + 0.5|x|_0 on [-2, 2]; minimum 0.5 at x = 1
    ProblemSpec p;
    p.base_cost = quad1d(1.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({0.5}, TermRole::Objective)) p.objective_terms.push_back(t);
    return p;
}

} // namespace

TEST_CASE("grid minimum of the 1-D l0 instance") {
    GridSpec grid;
    grid.resolution = {400};
    GridMinimum gm = grid_minimize(l0_instance(), grid);
    REQUIRE(gm.feasible_found);
    // at x=0: (0-1)^2 + 0 = 1; at x=1: 0 + 0.5 = 0.5; global 0.5
    CHECK(gm.value == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(!gm.argmins.empty());
    CHECK(gm.argmins[0][0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("smooth convex instance matches the analytic minimizer") {
    ProblemSpec p;
    p.base_cost = quad1d(0.3);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    GridSpec grid;
    grid.resolution = {256};
    GridMinimum gm = grid_minimize(p, grid);
    CHECK(gm.value == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(gm.argmins[0][0] == doctest::Approx(0.3).epsilon(1e-2));
}

TEST_CASE("infeasible-everywhere constraint reports an empty mask") {
    ProblemSpec p;
    p.base_cost = quad1d(0.0);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, 5.0);
    t.inner = FunctionHandle::constant(1, 1.0); // always on
    p.constraint_terms = {t};
    p.budget = 1.0;
    GridSpec grid;
    grid.resolution = {64};
    GridMinimum gm = grid_minimize(p, grid);
    CHECK(!gm.feasible_found);
    CHECK(gm.feasible_count == 0);
}

TEST_CASE("boundary snap finds the discontinuity") {
    // minimizer hides at the zero set of x - 0.3171 (not on the lattice)
    ProblemSpec p;
    p.base_cost = quad1d(0.0);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, -0.9); // reward for x > 0.3171
    t.inner = FunctionHandle::affine({1.0}, -0.3171, "x-0.3171");
    p.objective_terms = {t};
    GridSpec grid;
    grid.resolution = {64};
    GridMinimum gm = grid_minimize(p, grid);
    // best value just right of the crossing: 0.3171^2 - 0.9
    CHECK(gm.value == doctest::Approx(0.3171 * 0.3171 - 0.9).epsilon(1e-4));
}

TEST_CASE("refinement monotonicity") {
    ProblemSpec p = l0_instance();
    GridSpec coarse;
    coarse.resolution = {37};
    GridSpec fine;
    fine.resolution = {74};
    double v_coarse = grid_minimize(p, coarse).value;
    double v_fine = grid_minimize(p, fine).value;
    CHECK(v_fine <= v_coarse + 1e-12);
    GridSpec refined;
    refined.resolution = {37};
    refined.refine_levels = 3;
    CHECK(grid_minimize(p, refined).value <= v_coarse + 1e-12);
}

TEST_CASE("grid local minimizers of the l0 instance") {
    ProblemSpec p = l0_instance();
    GridSpec grid;
    grid.resolution = {400};
    auto mins = grid_local_minimizers(p, grid);
    // exactly two: x = 0 (value 1) and x = 1 (value 0.5)
    REQUIRE(mins.size() == 2);
    std::vector<double> xs = {mins[0][0], mins[1][0]};
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(xs[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mpcc enumerations agree on the l0 instance") {
    ProblemSpec p = l0_instance();
    GridSpec grid;
    grid.resolution = {400};
    GridMinimum gm = grid_minimize(p, grid);
    for (McpVariant v : {McpVariant::MPCC1, McpVariant::MPCC2, McpVariant::OnOff}) {
        EnumerationResult er = solve_mpcc_by_enumeration(p, grid, v);
        REQUIRE(er.feasible_found);
        CHECK(er.value == doctest::Approx(gm.value).epsilon(1e-9));
    }
}

TEST_CASE("on-off with empty selection reduces to the full sum") {
    // phi = 1, g = x - 10 < 0 on X: every variant keeps the term off
    ProblemSpec p;
    p.base_cost = quad1d(0.0);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(1, 1.0);
    t.inner = FunctionHandle::affine({1.0}, -10.0, "x-10");
    p.objective_terms = {t};
    GridSpec grid;
    grid.resolution = {128};
    EnumerationResult er = solve_mpcc_by_enumeration(p, grid, McpVariant::OnOff);
    CHECK(er.value == doctest::Approx(0.0).epsilon(1e-4));
}

TEST_CASE("sign-violating instance produces a detected gap") {
    // phi(x) = x, g(x) = x on [-1,1]: condition (A) holds on the zero set but
    // (B) fails below; the relaxed variants drop to -1 while the true minimum is 0
    ProblemSpec p;
    p.base_cost = FunctionHandle::constant(1, 0.0);
    p.feasible_set = PolyhedralSet::box({-1.0}, {1.0});
    HeavisideTerm t;
    t.multiplier = FunctionHandle::affine({1.0}, 0.0, "x");
    t.inner = FunctionHandle::affine({1.0}, 0.0, "x");
    p.objective_terms = {t};
    GridSpec grid;
    grid.resolution = {200};
    Rng rng(17);
    EquivalenceReport rep = equivalence_report(p, grid, rng);
    CHECK(rep.grid.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(!rep.sign_condition_b);
    bool gap_found = false;
    for (const auto& row : rep.rows) {
        if (row.name == "mpcc1") {
            CHECK(row.agrees); // (A) holds, MPCC1 matches
        } else {
            if (!row.agrees) gap_found = true;
            CHECK(row.value == doctest::Approx(-1.0).epsilon(1e-9));
        }
    }
    CHECK(gap_found);
}

TEST_CASE("equivalence report on a clean instance") {
    ProblemSpec p = l0_instance();
    GridSpec grid;
    grid.resolution = {300};
    Rng rng(23);
    EquivalenceReport rep = equivalence_report(p, grid, rng);
    CHECK(rep.sign_condition_b);
    CHECK(rep.all_agree());
}

TEST_CASE("functional constraint filters all variants alike") {
    // budget l0 constraint: minimize (x-1)^2 s.t. 0.5|x|_0 <= 0 forces x = 0
    ProblemSpec p;
    p.base_cost = quad1d(1.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({0.5}, TermRole::Constraint)) p.constraint_terms.push_back(t);
    p.budget = 0.0;
    GridSpec grid;
    grid.resolution = {257}; // odd segment count: 0 is not a lattice point
    GridMinimum gm = grid_minimize(p, grid);
    REQUIRE(gm.feasible_found);
    CHECK(gm.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(gm.argmins[0][0]) <= 1e-6);
}

TEST_CASE("feasible points persist under refinement") {
    // sign condition (A) holds (constant positive multiplier): the feasible
    // mask is closed, so coarse-level feasible points stay feasible nearby at
    // the finer level
    ProblemSpec p;
    p.base_cost = quad1d(1.0);
    p.feasible_set = PolyhedralSet::box({-2.0}, {2.0});
    for (auto& t : build_l0({0.5}, TermRole::Constraint)) p.constraint_terms.push_back(t);
    p.budget = 0.5;
    GridSpec coarse;
    coarse.resolution = {41};
    GridSpec fine;
    fine.resolution = {82};
    EvaluatedGrid cg = evaluate_grid(p, coarse);
    EvaluatedGrid fg = evaluate_grid(p, fine);
    for (std::size_t i = 0; i < cg.points.size(); ++i) {
        if (!cg.feasible[i]) continue;
        bool found = false;
        for (std::size_t j = 0; j < fg.points.size() && !found; ++j)
            if (fg.feasible[j] && dist_inf(cg.points[i], fg.points[j]) <= cg.max_spacing)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("oracle rejects unbounded or oversized problems") {
    ProblemSpec p;
    p.base_cost = quad1d(0.0);
    p.feasible_set = PolyhedralSet::box({0.0}, {std::numeric_limits<double>::infinity()});
    GridSpec grid;
    grid.resolution = {16};
    CHECK_THROWS(grid_minimize(p, grid));

    ProblemSpec big;
    big.base_cost = FunctionHandle::constant(4, 0.0);
    big.feasible_set = PolyhedralSet::box(Vec(4, -1.0), Vec(4, 1.0));
    GridSpec g4;
    g4.resolution = {4, 4, 4, 4};
    CHECK_THROWS(grid_minimize(big, g4));
}
