#ifndef HCOPT_LP_HPP
#define HCOPT_LP_HPP

#include <string>
#include <vector>

#include "hcopt/linalg.hpp"

namespace hcopt {

// Small dense linear programs:
//
//   minimize    c.z
//   subject to  A z <= b,   lo <= z <= hi.
//
// All variable bounds must be finite; every caller in this project works on a
// box, so unboundedness never arises. Solved by a two-phase tableau simplex
// with Bland's rule, which keeps pivoting deterministic and cycle-free.
struct LpProblem {
    int n = 0;
    Vec c;
    std::vector<Vec> rows; // coefficient row per inequality
    Vec rhs;
    Vec lo, hi;
};

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec z;
    double value = 0.0;
};

LpResult solve_lp(const LpProblem& p);

// Feasibility-only convenience (minimizes 0).
bool lp_feasible(const LpProblem& p, Vec* witness = nullptr);

} // namespace hcopt

#endif
