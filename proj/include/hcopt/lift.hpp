#ifndef HCOPT_LIFT_HPP
#define HCOPT_LIFT_HPP

#include <string>
#include <vector>

#include "hcopt/continuation.hpp"
#include "hcopt/model.hpp"
#include "hcopt/rng.hpp"
#include "hcopt/stationarity.hpp"

namespace hcopt {

// Membership of (t, x) in the epigraph of phi * step(g) over the ambient
// space, via the min-max inequality
//   min(max(phi(x) - t, -g(x)), max(g(x), -t)) <= 0.
bool epi_membership(double t, const Vec& x, const HeavisideTerm& term, double tol = 0.0);

struct PenaltyChoice {
    double lambda = 1.0;
    double lip_c = 0.0;
    double lip_phi_max = 0.0;
    int K = 0;
    double safety = 1.5;
    std::vector<LipschitzEstimate> estimates; // c first, then each objective multiplier
};

// lambda = safety * (Lip_c + K * max_k Lip_phi_k) + 1, constants estimated
// over X (user hints bypass sampling).
PenaltyChoice choose_penalty(const ProblemSpec& p, double safety, Rng& rng, int samples = 200);

enum class BranchSide { Up, Down };

// One disjunct per term: Up keeps the graph side (g >= 0, aux >= phi), Down
// the flat side (g <= 0, aux >= 0).
struct BranchAssignment {
    std::vector<BranchSide> obj_sides, con_sides;
};

struct BranchOutcome {
    BranchAssignment branch;
    bool feasible = false; // a feasible start was found for the branch set
    InnerReport inner;
    double lifted_objective = 0.0;
    Vec x, t, s;
    std::string note;
};

enum class RecoverCase { FeasibleWithSlack, AllEqual };

struct RecoverResult {
    Vec t, s;
    RecoverCase tag = RecoverCase::AllEqual;
    double functional_value = 0.0; // sum of recovered s
    bool functional_feasible = true;
};

struct LiftResult {
    std::vector<BranchOutcome> branches;
    std::vector<int> best; // tied best branch indices, reported together
    Vec x, t, s;
    RecoverResult recovered;
    double lifted_objective = 0.0;
    bool solved = false;
};

// Exhaustive branch solve of the penalized epigraphical formulation: each
// branch pins every term's disjunct, the auxiliaries collapse onto the
// selected side, and the remaining problem in x goes to the inner solver.
LiftResult solve_lifted(const ProblemSpec& p, double lambda, long branch_budget, const Vec& x0,
                        const InnerStop& stop = {}, const Tolerances& tol = {});

// t_k := phi_k(x) exactly on the positive class, 0 otherwise (likewise s);
// classifies the slack structure of the incoming s against the recovered
// values. Throws if (t, s) is not epigraph-feasible at x.
RecoverResult recover_auxiliary(const Vec& x, const Vec& t, const Vec& s, const ProblemSpec& p,
                                const Tolerances& tol = {});

struct TangentProbeReport {
    std::string case_name;
    bool equality_expected = false;
    int samples = 0;
    int agreements = 0;
    int formula_only = 0; // formula admits, exact cone does not
    int exact_only = 0;   // exact member missed by the formula: a violation
    bool pass = false;
};

// Compares the case-formula membership of directions (dt, v) against the
// exact tangent cone of the epigraph at (t_bar, x_bar). The epigraph of a
// piecewise-affine product over a polyhedron is a finite union of polyhedra,
// so the exact cone is the union of active-row cones of the pieces containing
// the point. Equality cases must agree on every sample; inclusion-only cases
// must never see an exact member that the formula misses.
TangentProbeReport tangent_formula_probe(const HeavisideTerm& term, const PolyhedralSet& S,
                                         double t_bar, const Vec& x_bar, int directions,
                                         Rng& rng, const Tolerances& tol = {});

} // namespace hcopt

#endif
