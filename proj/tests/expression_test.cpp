#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hcopt/config.hpp"
#include "hcopt/expression.hpp"
#include "hcopt/rng.hpp"

using namespace hcopt;

TEST_CASE("arithmetic evaluation") {
    FunctionHandle f = compile_expression("(x1-1)^2 + 0.5*x2", 2);
    CHECK(f.eval({3.0, 2.0}) == doctest::Approx(5.0));
    CHECK(f.structure() == FuncStructure::Smooth);
    CHECK(f.dir_deriv({3.0, 2.0}, {1.0, 0.0}) == doctest::Approx(4.0));
    CHECK(f.dir_deriv({3.0, 2.0}, {0.0, 1.0}) == doctest::Approx(0.5));
}

TEST_CASE("affine recognition") {
    FunctionHandle f = compile_expression("2*x1 - x2/4 + 3", 2);
    CHECK(f.piecewise_affine());
    CHECK(f.eval({1.0, 4.0}) == doctest::Approx(4.0));
    FunctionHandle g = compile_expression("x1*x2", 2);
    CHECK(!g.piecewise_affine());
}

TEST_CASE("min max abs produce structure") {
    FunctionHandle f = compile_expression("max(x1, x2)", 2);
    CHECK(f.structure() == FuncStructure::MaxOfSmooth);
    CHECK(f.eval({1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(f.dir_deriv({1.0, 1.0}, {1.0, -2.0}) == doctest::Approx(1.0));

    FunctionHandle a = compile_expression("abs(x1) - x2", 2);
    CHECK(a.eval({-0.5, 0.2}) == doctest::Approx(0.3));
    CHECK(a.piecewise_affine());

    FunctionHandle m = compile_expression("min(x1, 1 - x1)", 1);
    CHECK(m.eval({0.2}) == doctest::Approx(0.2));
    CHECK(m.eval({0.9}) == doctest::Approx(0.1 ).epsilon(1e-12));
}

TEST_CASE("structured gradients agree with finite differences") {
    Rng rng(55);
    FunctionHandle f = compile_expression("max(x1^2, 0.3 - x2) + abs(x1 - x2) - min(x1, 0.1)", 2);
    for (int i = 0; i < 100; ++i) {
        Vec x = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        double dd = f.dir_deriv(x, v);
        double fd = fd_dir_derivative_oracle(f, x, v);
        CHECK(std::fabs(dd - fd) <= 1e-5 * std::max(1.0, std::fabs(dd)));
    }
}

TEST_CASE("scalar multiples of nonsmooth parts are allowed, products are not") {
    CHECK_NOTHROW(compile_expression("2*abs(x1)", 1));
    CHECK_NOTHROW(compile_expression("abs(x1)/2", 1));
    CHECK_THROWS_AS(compile_expression("x1*abs(x1)", 1), ParseError);
    CHECK_THROWS_AS(compile_expression("abs(x1)^2", 1), ParseError);
    CHECK_THROWS_AS(compile_expression("1/abs(x1)", 1), ParseError);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_expression("x3", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("min(x1)", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("x1 +", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("foo(x1)", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("(x1", 2), ParseError);
}

TEST_CASE("problem config round trip") {
    const char* doc = R"(# sample problem
problem
  dimension 2
  bound all -2 2
  linear 1 1 <= 1.5
  objective (x1-1)^2 + (x2-0.5)^2
  objective_lipschitz 12
  budget 1.0
  seed 99
term
  role constraint
  flavor open
  multiplier 1
  inner x2 - 0.25
l0 objective 0.5 0.5
)";
    ProblemConfig cfg = parse_problem_config(doc);
    CHECK(cfg.seed == 99);
    CHECK(cfg.spec.dimension() == 2);
    CHECK(cfg.spec.K() == 4); // two l0 weights -> four terms
    CHECK(cfg.spec.L() == 1);
    CHECK(cfg.spec.budget == doctest::Approx(1.0));
    CHECK(cfg.spec.base_cost.lipschitz_hint.value() == doctest::Approx(12.0));
    CHECK(cfg.spec.feasible_set.inequalities.size() == 1);
    CHECK(cfg.spec.objective_value({0.0, 0.0}) == doctest::Approx(1.25));
    CHECK(cfg.spec.functional_value({0.0, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("config diagnostics carry line numbers") {
    CHECK_THROWS_AS(parse_problem_config("problem\n  bound all -1 1\n"), ConfigError);
    try {
        parse_problem_config("problem\n  dimension 1\n  l0 objective -0.5\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("nonnegative") != std::string::npos);
    }
    // constraint terms without a budget
    CHECK_THROWS_AS(parse_problem_config("problem\n  dimension 1\n  bound all -1 1\nterm\n"
                                         "  role constraint\n  flavor open\n  multiplier 1\n"
                                         "  inner x1\n"),
                    ConfigError);
    // >= rows are normalized
    ProblemConfig cfg = parse_problem_config(
        "problem\n  dimension 1\n  bound all -2 2\n  linear 1 >= -1\n");
    CHECK(cfg.spec.feasible_set.contains({0.0}));
    CHECK(!cfg.spec.feasible_set.contains({-1.5}));
}
