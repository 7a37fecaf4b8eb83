#include "hcopt/pwl.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "hcopt/lp.hpp"

namespace hcopt {

PwlExpr PwlExpr::linear(Vec r) {
    PwlExpr e;
    e.kind = Kind::Linear;
    e.row = std::move(r);
    return e;
}

PwlExpr PwlExpr::zero(int n) { return linear(Vec(n, 0.0)); }

PwlExpr PwlExpr::sum(std::vector<PwlExpr> kids) {
    if (kids.empty()) throw std::invalid_argument("pwl sum: empty");
    if (kids.size() == 1) return kids[0];
    PwlExpr e;
    e.kind = Kind::Sum;
    e.kids = std::move(kids);
    return e;
}

PwlExpr PwlExpr::max_of(std::vector<PwlExpr> kids) {
    if (kids.empty()) throw std::invalid_argument("pwl max: empty");
    if (kids.size() == 1) return kids[0];
    PwlExpr e;
    e.kind = Kind::Max;
    e.kids = std::move(kids);
    return e;
}

PwlExpr PwlExpr::plus_part(PwlExpr kid) {
    PwlExpr e;
    e.kind = Kind::Plus;
    e.kids.push_back(std::move(kid));
    return e;
}

PwlExpr PwlExpr::scaled(double alpha, PwlExpr kid) {
    if (alpha == 1.0) return kid;
    PwlExpr e;
    e.kind = Kind::Scale;
    e.factor = alpha;
    e.kids.push_back(std::move(kid));
    return e;
}

double PwlExpr::eval(const Vec& v) const {
    switch (kind) {
        case Kind::Linear: return dot(row, v);
        case Kind::Sum: {
            double s = 0.0;
            for (const auto& k : kids) s += k.eval(v);
            return s;
        }
        case Kind::Max: {
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& k : kids) m = std::max(m, k.eval(v));
            return m;
        }
        case Kind::Scale: return factor * kids[0].eval(v);
        case Kind::Plus: return std::max(kids[0].eval(v), 0.0);
    }
    return 0.0;
}

int PwlExpr::dim() const {
    if (kind == Kind::Linear) return static_cast<int>(row.size());
    return kids[0].dim();
}

PwlExpr dd_model(const FunctionHandle& f, const Vec& x, double eps_active) {
    if (!f.has_structure())
        throw std::logic_error("dd_model: handle '" + f.label + "' has no structure");
    std::vector<PwlExpr> up;
    for (int i : f.active_convex(x, eps_active))
        up.push_back(PwlExpr::linear(f.convex_parts()[i].gradient(x)));
    PwlExpr e = PwlExpr::max_of(std::move(up));
    if (!f.concave_parts().empty()) {
        std::vector<PwlExpr> down;
        for (int j : f.active_concave(x, eps_active))
            down.push_back(PwlExpr::linear(f.concave_parts()[j].gradient(x)));
        e = PwlExpr::sum({e, PwlExpr::scaled(-1.0, PwlExpr::max_of(std::move(down)))});
    }
    return e;
}

namespace {

// ---- exact path: cell enumeration -------------------------------------

void collect_choices(const PwlExpr& e, std::vector<const PwlExpr*>& out) {
    switch (e.kind) {
        case PwlExpr::Kind::Max:
            if (e.kids.size() > 1) out.push_back(&e);
            break;
        case PwlExpr::Kind::Plus: out.push_back(&e); break;
        default: break;
    }
    for (const auto& k : e.kids) collect_choices(k, out);
}

using Choice = std::unordered_map<const PwlExpr*, int>;

// With every max/plus node resolved by `choice`, the expression is linear;
// emits the validity rows of the chosen cell along the way.
Vec linearize(const PwlExpr& e, const Choice& choice, std::vector<Vec>& cell_rows) {
    switch (e.kind) {
        case PwlExpr::Kind::Linear: return e.row;
        case PwlExpr::Kind::Scale: {
            Vec r = linearize(e.kids[0], choice, cell_rows);
            return scaled(r, e.factor);
        }
        case PwlExpr::Kind::Sum: {
            Vec r = linearize(e.kids[0], choice, cell_rows);
            for (std::size_t i = 1; i < e.kids.size(); ++i)
                r = vsum(r, linearize(e.kids[i], choice, cell_rows));
            return r;
        }
        case PwlExpr::Kind::Max: {
            if (e.kids.size() == 1) return linearize(e.kids[0], choice, cell_rows);
            int c = choice.at(&e);
            Vec chosen = linearize(e.kids[c], choice, cell_rows);
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (static_cast<int>(i) == c) continue;
                Vec other = linearize(e.kids[i], choice, cell_rows);
                cell_rows.push_back(axpy(-1.0, chosen, other)); // other - chosen <= 0
            }
            return chosen;
        }
        case PwlExpr::Kind::Plus: {
            int c = choice.at(&e); // 0: kid attains (kid >= 0), 1: zero side
            Vec kid = linearize(e.kids[0], choice, cell_rows);
            if (c == 0) {
                cell_rows.push_back(scaled(kid, -1.0)); // -kid <= 0
                return kid;
            }
            cell_rows.push_back(kid); // kid <= 0
            return Vec(kid.size(), 0.0);
        }
    }
    return {};
}

long count_branches(const std::vector<const PwlExpr*>& nodes, long budget) {
    long total = 1;
    for (const PwlExpr* n : nodes) {
        long opts = n->kind == PwlExpr::Kind::Plus ? 2 : static_cast<long>(n->kids.size());
        if (total > budget / opts + 1) return budget + 1;
        total *= opts;
    }
    return total;
}

// ---- convex-majorant path ----------------------------------------------

// Lower bound collapsed to a single linear row (max >= first kid, plus >= 0).
Vec lower_row(const PwlExpr& e) {
    switch (e.kind) {
        case PwlExpr::Kind::Linear: return e.row;
        case PwlExpr::Kind::Scale: {
            if (e.factor >= 0.0) return scaled(lower_row(e.kids[0]), e.factor);
            // would need a linear upper bound of the kid, which a max does not
            // admit; dd models never nest negative scalings
            throw std::logic_error("pwl majorant: nested negative scaling");
        }
        case PwlExpr::Kind::Sum: {
            Vec r = lower_row(e.kids[0]);
            for (std::size_t i = 1; i < e.kids.size(); ++i) r = vsum(r, lower_row(e.kids[i]));
            return r;
        }
        case PwlExpr::Kind::Max: return lower_row(e.kids[0]);
        case PwlExpr::Kind::Plus: return Vec(e.dim(), 0.0);
    }
    return {};
}

// Convex upper transform: negative scalings collapse to linear lower bounds,
// everything else stays.
PwlExpr upper_expr(const PwlExpr& e) {
    switch (e.kind) {
        case PwlExpr::Kind::Linear: return e;
        case PwlExpr::Kind::Scale:
            if (e.factor >= 0.0) return PwlExpr::scaled(e.factor, upper_expr(e.kids[0]));
            return PwlExpr::linear(scaled(lower_row(e.kids[0]), e.factor));
        case PwlExpr::Kind::Sum: {
            std::vector<PwlExpr> kids;
            for (const auto& k : e.kids) kids.push_back(upper_expr(k));
            return PwlExpr::sum(std::move(kids));
        }
        case PwlExpr::Kind::Max: {
            std::vector<PwlExpr> kids;
            for (const auto& k : e.kids) kids.push_back(upper_expr(k));
            return PwlExpr::max_of(std::move(kids));
        }
        case PwlExpr::Kind::Plus: return PwlExpr::plus_part(upper_expr(e.kids[0]));
    }
    return e;
}

// Epigraph assembly of a convex expr over an extended variable space
// (v..., aux...). Returns the row whose dot with z bounds the expr from
// above, growing `aux_count` and appending rows as needed.
struct Assembler {
    int n;
    int aux_count = 0;
    std::vector<Vec> rows; // over (v, aux), rhs 0
    double aux_bound = 1.0;

    Vec widen(const Vec& r) const {
        Vec w(r);
        w.resize(n + aux_count, 0.0);
        return w;
    }

    Vec assemble(const PwlExpr& e) {
        switch (e.kind) {
            case PwlExpr::Kind::Linear: return widen(e.row);
            case PwlExpr::Kind::Scale: {
                if (e.factor < 0.0)
                    throw std::logic_error("pwl majorant: negative scale survived transform");
                return scaled(widen(assemble(e.kids[0])), e.factor);
            }
            case PwlExpr::Kind::Sum: {
                Vec r = assemble(e.kids[0]);
                for (std::size_t i = 1; i < e.kids.size(); ++i) {
                    Vec k = assemble(e.kids[i]);
                    r = widen(r);
                    r = vsum(r, widen(k));
                }
                return r;
            }
            case PwlExpr::Kind::Max:
            case PwlExpr::Kind::Plus: {
                std::vector<Vec> kid_rows;
                for (const auto& k : e.kids) kid_rows.push_back(assemble(k));
                int t = aux_count++;
                for (auto& row : rows) row.resize(n + aux_count, 0.0);
                Vec et(n + aux_count, 0.0);
                et[n + t] = 1.0;
                for (auto& kr : kid_rows) {
                    Vec c = widen(kr);
                    c[n + t] -= 1.0;
                    rows.push_back(std::move(c)); // kid - t <= 0
                }
                if (e.kind == PwlExpr::Kind::Plus) {
                    Vec c(n + aux_count, 0.0);
                    c[n + t] = -1.0;
                    rows.push_back(std::move(c)); // -t <= 0
                }
                return et;
            }
        }
        return {};
    }
};

double row_norm1_bound(const PwlExpr& e) {
    switch (e.kind) {
        case PwlExpr::Kind::Linear: return norm1(e.row);
        case PwlExpr::Kind::Scale: return std::fabs(e.factor) * row_norm1_bound(e.kids[0]);
        case PwlExpr::Kind::Sum: {
            double s = 0.0;
            for (const auto& k : e.kids) s += row_norm1_bound(k);
            return s;
        }
        case PwlExpr::Kind::Max:
        case PwlExpr::Kind::Plus: {
            double m = 0.0;
            for (const auto& k : e.kids) m = std::max(m, row_norm1_bound(k));
            return m;
        }
    }
    return 0.0;
}

} // namespace

PwlMinimizeResult minimize_pwl(const PwlExpr& objective, const std::vector<LinearRow>& fixed,
                               const std::vector<PwlConstraint>& constraints, int n,
                               const PwlMinimizeOptions& opts) {
    std::vector<const PwlExpr*> nodes;
    collect_choices(objective, nodes);
    for (const auto& c : constraints) collect_choices(c.expr, nodes);
    long branches = count_branches(nodes, opts.branch_budget);

    PwlMinimizeResult out;
    out.branches = branches;

    if (branches <= opts.branch_budget) {
        out.exact = true;
        bool first = true;
        std::vector<int> idx(nodes.size(), 0);
        for (;;) {
            Choice choice;
            for (std::size_t i = 0; i < nodes.size(); ++i) choice[nodes[i]] = idx[i];
            std::vector<Vec> rows;
            Vec obj_row = linearize(objective, choice, rows);
            for (const auto& c : constraints) rows.push_back(linearize(c.expr, choice, rows));

            LpProblem lp;
            lp.n = n;
            lp.c = obj_row;
            lp.lo.assign(n, -opts.box);
            lp.hi.assign(n, opts.box);
            for (const auto& f : fixed) {
                lp.rows.push_back(f.a);
                lp.rhs.push_back(f.rhs);
            }
            for (const auto& r : rows) {
                lp.rows.push_back(r);
                lp.rhs.push_back(0.0);
            }
            LpResult lr = solve_lp(lp);
            if (lr.status == LpStatus::Optimal && (first || lr.value < out.value)) {
                first = false;
                out.value = lr.value;
                out.v = lr.z;
            }
            // odometer
            std::size_t k = 0;
            for (; k < nodes.size(); ++k) {
                long optcount =
                    nodes[k]->kind == PwlExpr::Kind::Plus ? 2 : static_cast<long>(nodes[k]->kids.size());
                if (++idx[k] < optcount) break;
                idx[k] = 0;
            }
            if (k == nodes.size()) break;
            if (nodes.empty()) break;
        }
        if (first) { // no nodes at all and LP failed: cannot happen (v=0 feasible)
            out.value = 0.0;
            out.v.assign(n, 0.0);
        }
        return out;
    }

    // Budget exceeded: single LP on the convex majorant. The result remains a
    // valid descent certificate (value >= true min), not a stationarity proof.
    out.exact = false;
    Assembler as;
    as.n = n;
    PwlExpr obj_u = upper_expr(objective);
    Vec obj_row = as.assemble(obj_u);
    std::vector<Vec> con_rows;
    for (const auto& c : constraints) con_rows.push_back(as.assemble(upper_expr(c.expr)));

    double bound = 1.0 + row_norm1_bound(objective) * opts.box;
    for (const auto& c : constraints)
        bound = std::max(bound, 1.0 + row_norm1_bound(c.expr) * opts.box);

    LpProblem lp;
    lp.n = as.n + as.aux_count;
    lp.c = obj_row;
    lp.c.resize(lp.n, 0.0);
    lp.lo.assign(lp.n, -opts.box);
    lp.hi.assign(lp.n, opts.box);
    for (int j = as.n; j < lp.n; ++j) {
        lp.lo[j] = -bound;
        lp.hi[j] = bound;
    }
    auto widen = [&](Vec r) {
        r.resize(lp.n, 0.0);
        return r;
    };
    for (const auto& f : fixed) {
        lp.rows.push_back(widen(f.a));
        lp.rhs.push_back(f.rhs);
    }
    for (const auto& r : as.rows) {
        lp.rows.push_back(widen(r));
        lp.rhs.push_back(0.0);
    }
    for (const auto& r : con_rows) {
        lp.rows.push_back(widen(r));
        lp.rhs.push_back(0.0);
    }
    LpResult lr = solve_lp(lp);
    if (lr.status != LpStatus::Optimal) {
        out.value = 0.0;
        out.v.assign(n, 0.0);
        return out;
    }
    out.value = lr.value;
    out.v.assign(lr.z.begin(), lr.z.begin() + n);
    return out;
}

PwlMarginResult max_margin_pwl(const std::vector<LinearRow>& fixed,
                               const std::vector<PwlConstraint>& constraints, int n,
                               const PwlMinimizeOptions& opts) {
    std::vector<const PwlExpr*> nodes;
    for (const auto& c : constraints) collect_choices(c.expr, nodes);
    long branches = count_branches(nodes, opts.branch_budget);
    PwlMarginResult best;
    best.margin = -std::numeric_limits<double>::infinity();
    if (branches > opts.branch_budget) return {0.0, Vec(n, 0.0)};

    std::vector<int> idx(nodes.size(), 0);
    for (;;) {
        Choice choice;
        for (std::size_t i = 0; i < nodes.size(); ++i) choice[nodes[i]] = idx[i];
        std::vector<Vec> rows;
        std::vector<Vec> con_rows;
        for (const auto& c : constraints) con_rows.push_back(linearize(c.expr, choice, rows));

        // vars (v, m): maximize m s.t. cells, fixed, expr_i(v) + m <= 0, m <= 1
        LpProblem lp;
        lp.n = n + 1;
        lp.c.assign(n + 1, 0.0);
        lp.c[n] = -1.0;
        lp.lo.assign(n + 1, -opts.box);
        lp.hi.assign(n + 1, opts.box);
        lp.lo[n] = -1.0;
        lp.hi[n] = 1.0;
        auto widen = [&](Vec r, double mcoef) {
            r.resize(n + 1, 0.0);
            r[n] = mcoef;
            return r;
        };
        for (const auto& f : fixed) {
            lp.rows.push_back(widen(f.a, 0.0));
            lp.rhs.push_back(f.rhs);
        }
        for (const auto& r : rows) {
            lp.rows.push_back(widen(r, 0.0));
            lp.rhs.push_back(0.0);
        }
        for (const auto& r : con_rows) {
            lp.rows.push_back(widen(r, 1.0));
            lp.rhs.push_back(0.0);
        }
        LpResult lr = solve_lp(lp);
        if (lr.status == LpStatus::Optimal && -lr.value > best.margin) {
            best.margin = -lr.value;
            best.v.assign(lr.z.begin(), lr.z.begin() + n);
        }
        std::size_t k = 0;
        for (; k < nodes.size(); ++k) {
            long optcount =
                nodes[k]->kind == PwlExpr::Kind::Plus ? 2 : static_cast<long>(nodes[k]->kids.size());
            if (++idx[k] < optcount) break;
            idx[k] = 0;
        }
        if (k == nodes.size() || nodes.empty()) break;
    }
    if (!std::isfinite(best.margin)) return {0.0, Vec(n, 0.0)};
    return best;
}

bool pwl_cone_member(const Vec& v, const std::vector<LinearRow>& fixed,
                     const std::vector<PwlConstraint>& constraints, double tol) {
    for (const auto& f : fixed)
        if (dot(f.a, v) > f.rhs + tol) return false;
    for (const auto& c : constraints)
        if (c.expr.eval(v) > tol) return false;
    return true;
}

} // namespace hcopt
