#ifndef HCOPT_POLYHEDRON_HPP
#define HCOPT_POLYHEDRON_HPP

#include <limits>
#include <string>
#include <vector>

#include "hcopt/linalg.hpp"
#include "hcopt/lp.hpp"

namespace hcopt {

struct LinearRow {
    Vec a;
    double rhs = 0.0; // a.x <= rhs
};

// Polyhedron { x : A x <= d, lo <= x <= hi }. Bounds may be +-inf
// coordinate-wise; the grid oracle and Lipschitz sampling require a bounded
// set and check for it. Construction verifies nonemptiness with an LP.
struct PolyhedralSet {
    int n = 0;
    std::vector<LinearRow> inequalities;
    Vec lo, hi;

    static PolyhedralSet box(Vec lo, Vec hi);
    static PolyhedralSet make(int n, std::vector<LinearRow> rows, Vec lo, Vec hi);

    bool bounded() const;
    bool contains(const Vec& x, double tol = 1e-9) const;

    // Rows of the feasible-direction (tangent) cone at x: active inequalities
    // become a.v <= 0, active bounds become sign constraints on v.
    std::vector<LinearRow> tangent_rows(const Vec& x, double tol = 1e-9) const;

    // sup { tau >= 0 : x + tau v in the set }.
    double max_step(const Vec& x, const Vec& v) const;

    PolyhedralSet with_appended_coordinate(double new_lo, double new_hi) const;

    // Finite sampling box for bounded sets.
    void sampling_box(Vec* blo, Vec* bhi) const;
};

} // namespace hcopt

#endif
