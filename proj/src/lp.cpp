#include "hcopt/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hcopt {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Tableau simplex on the standard form produced below. Bland's rule.
struct Tableau {
    int m, n; // m rows, n structural+slack+artificial columns
    std::vector<Vec> a; // m x n
    Vec b;              // m
    Vec cost;           // n
    std::vector<int> basis;

    double solve_phase() {
        for (;;) {
            // reduced costs via basis cost recomputation (dense, tiny sizes)
            Vec y = reduced_costs();
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                if (y[j] < -kPivotTol) { enter = j; break; } // Bland: lowest index
            }
            if (enter < 0) break;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (a[i][enter] > kPivotTol) {
                    double ratio = b[i] / a[i][enter];
                    if (ratio < best_ratio - 1e-15 ||
                        (ratio < best_ratio + 1e-15 &&
                         (leave < 0 || basis[i] < basis[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) throw std::runtime_error("lp: unbounded pivot (missing box bound?)");
            pivot(leave, enter);
        }
        double v = 0.0;
        for (int i = 0; i < m; ++i) v += cost[basis[i]] * b[i];
        return v;
    }

    Vec reduced_costs() const {
        // y_j = c_j - c_B . B^{-1} A_j ; tableau is kept in B^{-1}-applied form,
        // so reduced cost is c_j - sum_i c_{basis[i]} * a[i][j].
        Vec y(cost);
        for (int i = 0; i < m; ++i) {
            double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < n; ++j) y[j] -= cb * a[i][j];
        }
        return y;
    }

    void pivot(int leave, int enter) {
        double piv = a[leave][enter];
        for (int j = 0; j < n; ++j) a[leave][j] /= piv;
        b[leave] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double f = a[i][enter];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) a[i][j] -= f * a[leave][j];
            b[i] -= f * b[leave];
        }
        basis[leave] = enter;
    }
};

} // namespace

LpResult solve_lp(const LpProblem& p) {
    const int n = p.n;
    if (static_cast<int>(p.c.size()) != n || p.lo.size() != p.hi.size() ||
        static_cast<int>(p.lo.size()) != n)
        throw std::invalid_argument("lp: inconsistent sizes");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(p.lo[j]) || !std::isfinite(p.hi[j]))
            throw std::invalid_argument("lp: bounds must be finite");
        if (p.lo[j] > p.hi[j] + kFeasTol) return {LpStatus::Infeasible, {}, 0.0};
    }

    // Shift z = lo + u, u in [0, span]; inequalities A u <= b - A lo plus
    // upper-bound rows u_j <= span_j; slack per row.
    const int m_ineq = static_cast<int>(p.rows.size());
    const int m = m_ineq + n;
    const int ncols = n + m; // structural + slacks
    std::vector<Vec> a(m, Vec(ncols, 0.0));
    Vec b(m, 0.0);
    for (int i = 0; i < m_ineq; ++i) {
        double shift = dot(p.rows[i], p.lo);
        for (int j = 0; j < n; ++j) a[i][j] = p.rows[i][j];
        a[i][n + i] = 1.0;
        b[i] = p.rhs[i] - shift;
    }
    for (int j = 0; j < n; ++j) {
        a[m_ineq + j][j] = 1.0;
        a[m_ineq + j][n + m_ineq + j] = 1.0;
        b[m_ineq + j] = p.hi[j] - p.lo[j];
    }

    // Phase 1: artificials on rows with negative rhs.
    std::vector<int> art_rows;
    for (int i = 0; i < m; ++i)
        if (b[i] < 0) art_rows.push_back(i);

    Tableau t;
    t.m = m;
    t.n = ncols + static_cast<int>(art_rows.size());
    t.a.assign(m, Vec(t.n, 0.0));
    t.b = b;
    t.basis.assign(m, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < ncols; ++j) t.a[i][j] = a[i][j];
    {
        int k = 0;
        for (int i = 0; i < m; ++i) {
            if (t.b[i] < 0) {
                for (int j = 0; j < t.n; ++j) t.a[i][j] = -t.a[i][j];
                t.b[i] = -t.b[i];
                t.a[i][ncols + k] = 1.0;
                t.basis[i] = ncols + k;
                ++k;
            } else {
                t.basis[i] = n + i; // slack
            }
        }
    }

    if (!art_rows.empty()) {
        t.cost.assign(t.n, 0.0);
        for (std::size_t k = 0; k < art_rows.size(); ++k) t.cost[ncols + k] = 1.0;
        double p1 = t.solve_phase();
        if (p1 > kFeasTol) return {LpStatus::Infeasible, {}, 0.0};
        // Drive any artificial still in the basis out (degenerate rows).
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] >= ncols) {
                int enter = -1;
                for (int j = 0; j < ncols; ++j)
                    if (std::fabs(t.a[i][j]) > kPivotTol) { enter = j; break; }
                if (enter >= 0) t.pivot(i, enter);
                // else the row is all-zero: redundant, harmless.
            }
        }
    }

    // Phase 2.
    t.cost.assign(t.n, 0.0);
    for (int j = 0; j < n; ++j) t.cost[j] = p.c[j];
    for (std::size_t k = 0; k < art_rows.size(); ++k) t.cost[ncols + k] = 1e30; // keep out
    t.solve_phase();

    Vec u(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) u[t.basis[i]] = t.b[i];
    Vec z(n);
    for (int j = 0; j < n; ++j) z[j] = p.lo[j] + u[j];
    return {LpStatus::Optimal, z, dot(p.c, z)};
}

bool lp_feasible(const LpProblem& p, Vec* witness) {
    LpProblem q(p);
    q.c.assign(p.n, 0.0);
    LpResult r = solve_lp(q);
    if (r.status == LpStatus::Optimal && witness) *witness = r.z;
    return r.status == LpStatus::Optimal;
}

} // namespace hcopt
