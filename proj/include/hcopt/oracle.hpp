#ifndef HCOPT_ORACLE_HPP
#define HCOPT_ORACLE_HPP

#include <string>
#include <vector>

#include "hcopt/model.hpp"
#include "hcopt/rng.hpp"
#include "hcopt/stationarity.hpp"

namespace hcopt {

// Desk-scale ground truth by exhaustive evaluation. The base lattice is
// augmented with every inner-function zero crossing found by bisection along
// grid lines, plus a point just left and right of each crossing, so the sign
// structure on both sides of every discontinuity is represented.
struct GridSpec {
    std::vector<int> resolution; // points per axis - 1 (segments)
    int refine_levels = 1;
    bool boundary_snap = true;
    double value_tol = 1e-6;
    double side_offset = 1e-9; // crossing side-sample offset (scaled by span)
    int max_threads = 1;
};

struct EvaluatedGrid {
    std::vector<Vec> points;
    std::vector<double> objective;  // exact Phi
    std::vector<double> functional; // exact constraint sum
    std::vector<bool> feasible;
    double max_spacing = 0.0;
    double modulus = 0.0; // local variation estimate used in the value tolerance
    double value_tol_effective = 0.0;
};

EvaluatedGrid evaluate_grid(const ProblemSpec& p, const GridSpec& grid);

struct GridMinimum {
    double value = 0.0;
    std::vector<Vec> argmins;       // all feasible minimizers within value_tol
    long feasible_count = 0;
    long total_points = 0;
    double value_tol_effective = 0.0;
    bool feasible_found = false;
};

// Exact evaluation of the discontinuous objective on the augmented grid.
// Requires a bounded set and dimension <= 3.
GridMinimum grid_minimize(const ProblemSpec& p, const GridSpec& grid);

// Grid points that beat every neighbor within 1.5 spacings, re-verified on a
// locally refined neighborhood; candidates whose refinement finds a better
// nearby value are dropped.
std::vector<Vec> grid_local_minimizers(const ProblemSpec& p, const GridSpec& grid);

enum class McpVariant { MPCC1, MPCC2, OnOff };

struct EnumerationResult {
    McpVariant variant = McpVariant::MPCC1;
    double value = 0.0;
    std::vector<Vec> solutions;
    bool feasible_found = false;
};

// Complementarity/on-off reformulations solved by binary pattern enumeration
// over the same evaluated grid. Vertex optimality of binary patterns holds
// because the objective is linear in the selection variables.
EnumerationResult solve_mpcc_by_enumeration(const ProblemSpec& p, const GridSpec& grid,
                                            McpVariant variant, long pattern_budget = 4096);

struct EquivalenceRow {
    std::string name;
    double value = 0.0;
    double gap = 0.0; // against the grid minimum
    bool agrees = false;
    bool feasible_found = false;
};

struct EquivalenceReport {
    GridMinimum grid;
    std::vector<EquivalenceRow> rows;
    bool sign_condition_b = false; // verified by check_sign_conditions
    bool sign_condition_a = false;
    bool all_agree() const {
        for (const auto& r : rows)
            if (!r.agrees) return false;
        return !rows.empty();
    }
};

EquivalenceReport equivalence_report(const ProblemSpec& p, const GridSpec& grid, Rng& rng);

} // namespace hcopt

#endif
