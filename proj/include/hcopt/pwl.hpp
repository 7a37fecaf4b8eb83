#ifndef HCOPT_PWL_HPP
#define HCOPT_PWL_HPP

#include <vector>

#include "hcopt/function_handle.hpp"
#include "hcopt/polyhedron.hpp"

namespace hcopt {

// Positively homogeneous piecewise-linear expressions in a direction v:
// linear rows combined by sums, maxima, nonneg-part nodes and scalings.
// Directional-derivative models of structured handles live here, as do the
// cone constraints built from them. Minimization over a polyhedral cone
// intersected with a box is exact via cell enumeration: every max/plus node
// picks an attaining branch, validity rows pin the cell, and each cell is a
// dense LP.
struct PwlExpr {
    enum class Kind { Linear, Sum, Max, Scale, Plus };
    Kind kind = Kind::Linear;
    Vec row;
    std::vector<PwlExpr> kids;
    double factor = 1.0;

    static PwlExpr linear(Vec r);
    static PwlExpr zero(int n);
    static PwlExpr sum(std::vector<PwlExpr> kids);
    static PwlExpr max_of(std::vector<PwlExpr> kids);
    static PwlExpr plus_part(PwlExpr kid); // max(kid, 0)
    static PwlExpr scaled(double alpha, PwlExpr kid);

    double eval(const Vec& v) const;
    int dim() const;
};

// Exact dd model of a structured handle at x: active convex pieces in a max,
// active concave pieces subtracted.
PwlExpr dd_model(const FunctionHandle& f, const Vec& x, double eps_active = 1e-9);

struct PwlConstraint {
    PwlExpr expr; // expr(v) <= 0
};

struct PwlMinimizeOptions {
    double box = 1.0;
    int branch_budget = 4096;
};

struct PwlMinimizeResult {
    bool exact = true; // false when the budget forced the convex majorant
    double value = 0.0;
    Vec v;
    long branches = 0;
};

// min objective(v) s.t. fixed rows (a.v <= rhs), pwl constraints (expr <= 0),
// |v|_inf <= box. v = 0 is always feasible, so the value is never positive.
PwlMinimizeResult minimize_pwl(const PwlExpr& objective, const std::vector<LinearRow>& fixed,
                               const std::vector<PwlConstraint>& constraints, int n,
                               const PwlMinimizeOptions& opts = {});

// Largest margin m <= 1 with all constraints expr_i(v) <= -m on the box;
// m > 0 certifies strict (Slater-style) feasibility of the cone interior.
struct PwlMarginResult {
    double margin = 0.0;
    Vec v;
};
PwlMarginResult max_margin_pwl(const std::vector<LinearRow>& fixed,
                               const std::vector<PwlConstraint>& constraints, int n,
                               const PwlMinimizeOptions& opts = {});

// Membership of a concrete direction: all fixed rows and constraints within tol.
bool pwl_cone_member(const Vec& v, const std::vector<LinearRow>& fixed,
                     const std::vector<PwlConstraint>& constraints, double tol = 1e-9);

} // namespace hcopt

#endif
