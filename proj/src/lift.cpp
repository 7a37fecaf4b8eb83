#include "hcopt/lift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcopt/lp.hpp"

namespace hcopt {

bool epi_membership(double t, const Vec& x, const HeavisideTerm& term, double tol) {
    if (term.flavor != Flavor::Open)
        throw std::invalid_argument("epi_membership: canonical (open) term required");
    double phi = term.multiplier.eval(x);
    double g = term.inner.eval(x);
    double lhs = std::min(std::max(phi - t, -g), std::max(g, -t));
    return lhs <= tol;
}

PenaltyChoice choose_penalty(const ProblemSpec& p, double safety, Rng& rng, int samples) {
    if (safety < 1.0) throw std::invalid_argument("choose_penalty: safety factor below 1");
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    PenaltyChoice out;
    out.safety = safety;
    out.K = canon.K();
    LipschitzEstimate ec = estimate_lipschitz(canon.base_cost, canon.feasible_set, samples, rng);
    out.lip_c = ec.value;
    out.estimates.push_back(ec);
    for (const auto& term : canon.objective_terms) {
        LipschitzEstimate e =
            estimate_lipschitz(term.multiplier, canon.feasible_set, samples, rng);
        out.lip_phi_max = std::max(out.lip_phi_max, e.value);
        out.estimates.push_back(e);
    }
    out.lambda = safety * (out.lip_c + out.K * out.lip_phi_max) + 1.0;
    return out;
}

namespace {

struct AffineRow {
    Vec a;
    double c = 0.0;
    bool ok = false;
};

AffineRow affine_of(const FunctionHandle& f) {
    AffineRow out;
    if (!f.piecewise_affine()) return out;
    if (f.convex_parts().size() != 1 || f.concave_parts().size() > 1) return out;
    Vec zero(f.dimension(), 0.0);
    out.a = f.convex_parts()[0].gradient(zero);
    out.c = f.convex_parts()[0].value(zero);
    if (f.concave_parts().size() == 1) {
        out.a = axpy(-1.0, f.concave_parts()[0].gradient(zero), out.a);
        out.c -= f.concave_parts()[0].value(zero);
    }
    out.ok = true;
    return out;
}

// Feasible start for a branch: the warm start if it fits, else an LP when the
// branch rows are affine, else deterministic rejection sampling.
bool find_branch_start(const PolyhedralSet& X, const std::vector<SignedConstraint>& extra,
                       const Vec& warm, Rng& rng, Vec* start) {
    auto feasible = [&](const Vec& x) {
        if (!X.contains(x, 1e-9)) return false;
        for (const auto& c : extra)
            if (!c.satisfied(x, 1e-9)) return false;
        return true;
    };
    if (feasible(warm)) {
        *start = warm;
        return true;
    }
    bool all_affine = true;
    for (const auto& c : extra) all_affine = all_affine && affine_of(c.fn).ok;
    if (all_affine && X.bounded()) {
        LpProblem lp;
        lp.n = X.n;
        lp.c.assign(X.n, 0.0);
        lp.lo = X.lo;
        lp.hi = X.hi;
        for (const auto& r : X.inequalities) {
            lp.rows.push_back(r.a);
            lp.rhs.push_back(r.rhs);
        }
        for (const auto& c : extra) {
            AffineRow ar = affine_of(c.fn);
            if (c.leq) {
                lp.rows.push_back(ar.a);
                lp.rhs.push_back(-ar.c);
            } else {
                lp.rows.push_back(scaled(ar.a, -1.0));
                lp.rhs.push_back(ar.c);
            }
        }
        LpResult lr = solve_lp(lp);
        if (lr.status != LpStatus::Optimal) return false;
        *start = lr.z;
        return true;
    }
    if (!X.bounded()) return false;
    Vec blo, bhi;
    X.sampling_box(&blo, &bhi);
    for (int s = 0; s < 4000; ++s) {
        Vec x = rng.uniform_vec(blo, bhi);
        if (feasible(x)) {
            *start = x;
            return true;
        }
    }
    return false;
}

} // namespace

LiftResult solve_lifted(const ProblemSpec& p, double lambda, long branch_budget, const Vec& x0,
                        const InnerStop& stop, const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    const int K = canon.K(), L = canon.L();
    if (K + L >= 62 || (1L << (K + L)) > branch_budget)
        throw std::invalid_argument("solve_lifted: 2^(K+L) exceeds the branch budget");

    LiftResult out;
    Rng rng(20250401);
    const long total = 1L << (K + L);
    for (long mask = 0; mask < total; ++mask) {
        BranchOutcome bo;
        bo.branch.obj_sides.resize(K);
        bo.branch.con_sides.resize(L);
        std::vector<SignedConstraint> extra;
        std::vector<int> up_k, up_l;
        for (int k = 0; k < K; ++k) {
            bool up = (mask >> k) & 1;
            bo.branch.obj_sides[k] = up ? BranchSide::Up : BranchSide::Down;
            extra.push_back({canon.objective_terms[k].inner, !up,
                             std::string("g") + std::to_string(k + 1) + (up ? ">=0" : "<=0")});
            if (up) up_k.push_back(k);
        }
        for (int l = 0; l < L; ++l) {
            bool up = (mask >> (K + l)) & 1;
            bo.branch.con_sides[l] = up ? BranchSide::Up : BranchSide::Down;
            extra.push_back({canon.constraint_terms[l].inner, !up,
                             std::string("h") + std::to_string(l + 1) + (up ? ">=0" : "<=0")});
            if (up) up_l.push_back(l);
        }

        Vec start;
        if (!find_branch_start(canon.feasible_set, extra, x0, rng, &start)) {
            bo.feasible = false;
            bo.note = "branch region empty (or no start found)";
            out.branches.push_back(std::move(bo));
            continue;
        }
        bo.feasible = true;

        // Branch objective in x: the auxiliaries sit on their lower envelope.
        auto value = [&, up_k, up_l](const Vec& x) {
            double s = canon.base_cost.eval(x);
            for (int k : up_k) s += canon.objective_terms[k].multiplier.eval(x);
            if (L > 0) {
                double agg = -canon.budget;
                for (int l : up_l) agg += canon.constraint_terms[l].multiplier.eval(x);
                s += lambda * std::max(agg, 0.0);
            }
            return s;
        };
        auto dd = [&, up_k, up_l](const Vec& x, const Vec& v) {
            double s = canon.base_cost.dir_deriv(x, v, tol.eps_active);
            for (int k : up_k)
                s += canon.objective_terms[k].multiplier.dir_deriv(x, v, tol.eps_active);
            if (L > 0) {
                double agg = -canon.budget;
                double pdd = 0.0;
                for (int l : up_l) {
                    agg += canon.constraint_terms[l].multiplier.eval(x);
                    pdd += canon.constraint_terms[l].multiplier.dir_deriv(x, v, tol.eps_active);
                }
                if (agg > 1e-10)
                    s += lambda * pdd;
                else if (agg >= -1e-10)
                    s += lambda * std::max(pdd, 0.0);
            }
            return s;
        };
        auto model = [&, up_k, up_l](const Vec& x) {
            std::vector<PwlExpr> parts;
            parts.push_back(dd_model(canon.base_cost, x, tol.eps_active));
            for (int k : up_k)
                parts.push_back(dd_model(canon.objective_terms[k].multiplier, x, tol.eps_active));
            if (L > 0) {
                double agg = -canon.budget;
                for (int l : up_l) agg += canon.constraint_terms[l].multiplier.eval(x);
                if (agg > 1e-10 || std::fabs(agg) <= 1e-10) {
                    std::vector<PwlExpr> pen;
                    for (int l : up_l)
                        pen.push_back(
                            dd_model(canon.constraint_terms[l].multiplier, x, tol.eps_active));
                    if (!pen.empty()) {
                        PwlExpr sum = PwlExpr::sum(std::move(pen));
                        parts.push_back(PwlExpr::scaled(
                            lambda, agg > 1e-10 ? sum : PwlExpr::plus_part(std::move(sum))));
                    }
                }
            }
            return PwlExpr::sum(std::move(parts));
        };

        NlpObjective obj;
        obj.value = value;
        obj.dd = dd;
        obj.direction_model = model;
        bo.inner = inner_solve(obj, canon.feasible_set, extra, start, stop, tol.eps_active);
        bo.x = bo.inner.x;
        bo.t.assign(K, 0.0);
        bo.s.assign(L, 0.0);
        for (int k : up_k) bo.t[k] = canon.objective_terms[k].multiplier.eval(bo.x);
        for (int l : up_l) bo.s[l] = canon.constraint_terms[l].multiplier.eval(bo.x);
        bo.lifted_objective = bo.inner.objective;
        out.branches.push_back(std::move(bo));
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.branches.size(); ++i) {
        const BranchOutcome& bo = out.branches[i];
        if (!bo.feasible) continue;
        best = std::min(best, bo.lifted_objective);
    }
    for (std::size_t i = 0; i < out.branches.size(); ++i) {
        const BranchOutcome& bo = out.branches[i];
        if (bo.feasible && bo.lifted_objective <= best + 1e-9)
            out.best.push_back(static_cast<int>(i));
    }
    if (out.best.empty()) return out;

    const BranchOutcome& winner = out.branches[out.best.front()];
    out.solved = true;
    out.x = winner.x;
    out.t = winner.t;
    out.s = winner.s;
    out.lifted_objective = winner.lifted_objective;
    out.recovered = recover_auxiliary(out.x, out.t, out.s, canon, tol);
    return out;
}

RecoverResult recover_auxiliary(const Vec& x, const Vec& t, const Vec& s, const ProblemSpec& p,
                                const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    if (static_cast<int>(t.size()) != canon.K() || static_cast<int>(s.size()) != canon.L())
        throw std::invalid_argument("recover_auxiliary: auxiliary size mismatch");
    for (int k = 0; k < canon.K(); ++k)
        if (!epi_membership(t[k], x, canon.objective_terms[k], 1e-9))
            throw std::invalid_argument("recover_auxiliary: (t, x) not epigraph-feasible");
    for (int l = 0; l < canon.L(); ++l)
        if (!epi_membership(s[l], x, canon.constraint_terms[l], 1e-9))
            throw std::invalid_argument("recover_auxiliary: (s, x) not epigraph-feasible");

    RecoverResult out;
    out.t.resize(canon.K());
    out.s.resize(canon.L());
    auto pulled = [&](const HeavisideTerm& term) {
        return term.inner.eval(x) > tol.eps_part ? term.multiplier.eval(x) : 0.0;
    };
    for (int k = 0; k < canon.K(); ++k) out.t[k] = pulled(canon.objective_terms[k]);
    double sum_pi = 0.0;
    bool slack_seen = false;
    double sum_s = 0.0;
    for (int l = 0; l < canon.L(); ++l) {
        out.s[l] = pulled(canon.constraint_terms[l]);
        sum_pi += out.s[l];
        sum_s += s[l];
        if (s[l] > out.s[l] + 1e-9) slack_seen = true;
    }
    out.functional_value = sum_pi;
    out.functional_feasible = canon.L() == 0 || sum_pi <= canon.budget + tol.feas_tol;
    out.tag = (slack_seen && sum_s <= canon.budget + tol.feas_tol) ? RecoverCase::FeasibleWithSlack
                                                                   : RecoverCase::AllEqual;
    return out;
}

namespace {

struct AffinePiece {
    Vec a;
    double c = 0.0;
    std::vector<LinearRow> cell; // affine validity rows a.x <= rhs
};

// Affine cells of a piecewise-affine handle: one per (convex, concave) piece
// selection, with validity rows pinning the argmax choices.
std::vector<AffinePiece> affine_cells(const FunctionHandle& f) {
    if (!f.piecewise_affine())
        throw std::invalid_argument("tangent probe: '" + f.label + "' is not piecewise affine");
    Vec zero(f.dimension(), 0.0);
    auto row_of = [&](const SmoothPiece& p) {
        AffineRow r;
        r.a = p.gradient(zero);
        r.c = p.value(zero);
        return r;
    };
    std::vector<AffinePiece> cells;
    const auto& U = f.convex_parts();
    const auto& W = f.concave_parts();
    for (std::size_t i = 0; i < U.size(); ++i) {
        AffineRow ui = row_of(U[i]);
        std::vector<LinearRow> urows;
        for (std::size_t a = 0; a < U.size(); ++a) {
            if (a == i) continue;
            AffineRow ua = row_of(U[a]);
            urows.push_back({axpy(-1.0, ui.a, ua.a), ui.c - ua.c}); // u_a - u_i <= 0
        }
        if (W.empty()) {
            AffinePiece cell;
            cell.a = ui.a;
            cell.c = ui.c;
            cell.cell = urows;
            cells.push_back(std::move(cell));
            continue;
        }
        for (std::size_t j = 0; j < W.size(); ++j) {
            AffineRow wj = row_of(W[j]);
            AffinePiece cell;
            cell.a = axpy(-1.0, wj.a, ui.a);
            cell.c = ui.c - wj.c;
            cell.cell = urows;
            for (std::size_t b = 0; b < W.size(); ++b) {
                if (b == j) continue;
                AffineRow wb = row_of(W[b]);
                cell.cell.push_back({axpy(-1.0, wj.a, wb.a), wj.c - wb.c});
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<LinearRow> polyhedron_rows(const PolyhedralSet& S) {
    std::vector<LinearRow> rows = S.inequalities;
    for (int i = 0; i < S.n; ++i) {
        if (std::isfinite(S.lo[i])) rows.push_back({scaled(unit(S.n, i), -1.0), -S.lo[i]});
        if (std::isfinite(S.hi[i])) rows.push_back({unit(S.n, i), S.hi[i]});
    }
    return rows;
}

// A polyhedral piece of the epigraph over the (t, x) space.
struct EpiPiece {
    std::vector<LinearRow> rows; // row over (t, x...): a0*t + a.x <= rhs
};

LinearRow lift_x_row(const LinearRow& r) {
    LinearRow out;
    out.a.assign(r.a.size() + 1, 0.0);
    for (std::size_t i = 0; i < r.a.size(); ++i) out.a[i + 1] = r.a[i];
    out.rhs = r.rhs;
    return out;
}

} // namespace

TangentProbeReport tangent_formula_probe(const HeavisideTerm& term, const PolyhedralSet& S,
                                         double t_bar, const Vec& x_bar, int directions,
                                         Rng& rng, const Tolerances& tol) {
    if (term.flavor != Flavor::Open)
        throw std::invalid_argument("tangent probe: canonical (open) term required");
    const int n = S.n;
    const FunctionHandle& psi = term.multiplier;
    const FunctionHandle& f = term.inner;
    std::vector<AffinePiece> psi_cells = affine_cells(psi);
    std::vector<AffinePiece> f_cells = affine_cells(f);
    std::vector<LinearRow> s_rows = polyhedron_rows(S);

    const double psi_val = psi.eval(x_bar);
    const double f_val = f.eval(x_bar);
    const double pi_val = f_val > 0.0 ? psi_val : 0.0;
    const double act = 1e-9;

    if (std::min(std::max(psi_val - t_bar, -f_val), std::max(f_val, -t_bar)) > act)
        throw std::invalid_argument("tangent probe: (t, x) outside the epigraph");

    // Exact pieces: per joint affine cell, the graph side and the flat side.
    std::vector<EpiPiece> pieces;
    for (const auto& pc : psi_cells) {
        for (const auto& fc : f_cells) {
            EpiPiece graph;
            for (const auto& r : pc.cell) graph.rows.push_back(lift_x_row(r));
            for (const auto& r : fc.cell) graph.rows.push_back(lift_x_row(r));
            for (const auto& r : s_rows) graph.rows.push_back(lift_x_row(r));
            {
                LinearRow r; // psi(x) - t <= 0
                r.a.assign(n + 1, 0.0);
                r.a[0] = -1.0;
                for (int i = 0; i < n; ++i) r.a[i + 1] = pc.a[i];
                r.rhs = -pc.c;
                graph.rows.push_back(std::move(r));
            }
            {
                LinearRow r; // -f(x) <= 0
                r.a.assign(n + 1, 0.0);
                for (int i = 0; i < n; ++i) r.a[i + 1] = -fc.a[i];
                r.rhs = fc.c;
                graph.rows.push_back(std::move(r));
            }
            pieces.push_back(std::move(graph));

            EpiPiece flat;
            for (const auto& r : fc.cell) flat.rows.push_back(lift_x_row(r));
            for (const auto& r : s_rows) flat.rows.push_back(lift_x_row(r));
            {
                LinearRow r; // f(x) <= 0
                r.a.assign(n + 1, 0.0);
                for (int i = 0; i < n; ++i) r.a[i + 1] = fc.a[i];
                r.rhs = -fc.c;
                flat.rows.push_back(std::move(r));
            }
            {
                LinearRow r; // -t <= 0
                r.a.assign(n + 1, 0.0);
                r.a[0] = -1.0;
                r.rhs = 0.0;
                flat.rows.push_back(std::move(r));
            }
            pieces.push_back(std::move(flat));
        }
    }

    Vec point(n + 1);
    point[0] = t_bar;
    for (int i = 0; i < n; ++i) point[i + 1] = x_bar[i];
    auto exact_member = [&](const Vec& dir) {
        for (const auto& piece : pieces) {
            bool contains = true, tangent_ok = true;
            for (const auto& r : piece.rows) {
                double val = dot(r.a, point);
                if (val > r.rhs + act) {
                    contains = false;
                    break;
                }
                if (val >= r.rhs - act && dot(r.a, dir) > act) tangent_ok = false;
            }
            if (contains && tangent_ok) return true;
        }
        return false;
    };

    // Case formulas.
    std::vector<LinearRow> t_rows = S.tangent_rows(x_bar, act);
    auto in_TS = [&](const Vec& v) {
        for (const auto& r : t_rows)
            if (dot(r.a, v) > act) return false;
        return true;
    };
    auto psi_dd = [&](const Vec& v) { return psi.dir_deriv(x_bar, v, tol.eps_active); };
    auto f_dd = [&](const Vec& v) { return f.dir_deriv(x_bar, v, tol.eps_active); };

    TangentProbeReport rep;
    std::function<bool(double, const Vec&)> formula;
    const bool t_at_pi = std::fabs(t_bar - pi_val) <= act;
    if (t_at_pi && f_val > act) {
        rep.case_name = "graph: f>0";
        rep.equality_expected = true;
        formula = [&](double dt, const Vec& v) { return in_TS(v) && dt >= psi_dd(v) - act; };
    } else if (t_at_pi && f_val < -act) {
        rep.case_name = "flat: f<0";
        rep.equality_expected = true;
        formula = [&](double dt, const Vec& v) { return in_TS(v) && dt >= -act; };
    } else if (t_at_pi && std::fabs(f_val) <= act && psi_val > act) {
        // piecewise-affine data satisfy the ACQ, so the inclusion is tight
        rep.case_name = "boundary: f=0<psi";
        rep.equality_expected = true;
        formula = [&](double dt, const Vec& v) {
            return in_TS(v) && dt >= -act && f_dd(v) <= act;
        };
    } else if (t_at_pi) {
        rep.case_name = "boundary: f=0=psi";
        // equality needs the dd-level sign condition: psi'(x;.) nonnegative
        // where f'(x;.) vanishes on the tangent cone; with piecewise-affine
        // data the remaining qualifications hold automatically
        std::vector<PwlConstraint> ddzero = {{dd_model(f, x_bar, tol.eps_active)},
                                             {PwlExpr::scaled(-1.0, dd_model(f, x_bar,
                                                                             tol.eps_active))}};
        PwlMinimizeResult sign_check =
            minimize_pwl(dd_model(psi, x_bar, tol.eps_active), t_rows, ddzero, n);
        rep.equality_expected = sign_check.exact && sign_check.value >= -1e-9;
        formula = [&](double dt, const Vec& v) {
            if (!in_TS(v)) return false;
            bool graph = dt >= psi_dd(v) - act && f_dd(v) >= -act;
            bool flat = dt >= -act && f_dd(v) <= act;
            return graph || flat;
        };
    } else if (std::fabs(f_val) > act || psi_val <= act) {
        rep.case_name = "interior above: f!=0 or psi=0";
        rep.equality_expected = true;
        formula = [&](double, const Vec& v) { return in_TS(v); };
    } else if (t_bar > psi_val + act) {
        rep.case_name = "above graph: t>psi, f=0";
        rep.equality_expected = true;
        formula = [&](double, const Vec& v) { return in_TS(v); };
    } else if (t_bar < psi_val - act) {
        rep.case_name = "between: 0<t<psi, f=0";
        rep.equality_expected = false;
        formula = [&](double, const Vec& v) { return in_TS(v) && f_dd(v) <= act; };
    } else {
        rep.case_name = "touching: t=psi>0, f=0";
        rep.equality_expected = false;
        formula = [&](double dt, const Vec& v) {
            if (!in_TS(v)) return false;
            bool graph = dt >= psi_dd(v) - act && f_dd(v) >= -act;
            bool flat = f_dd(v) <= act;
            return graph || flat;
        };
    }

    for (int sdir = 0; sdir < directions; ++sdir) {
        Vec dir(n + 1);
        for (int i = 0; i <= n; ++i) dir[i] = rng.uniform(-2.0, 2.0);
        double dt = dir[0];
        Vec v(dir.begin() + 1, dir.end());
        bool ex = exact_member(dir);
        bool fo = formula(dt, v);
        ++rep.samples;
        if (ex == fo)
            ++rep.agreements;
        else if (fo)
            ++rep.formula_only;
        else
            ++rep.exact_only;
    }
    rep.pass = rep.equality_expected ? rep.agreements == rep.samples : rep.exact_only == 0;
    return rep;
}

} // namespace hcopt
