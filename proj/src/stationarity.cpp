#include "hcopt/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcopt/lp.hpp"

namespace hcopt {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void classify(double value, double eps, int index, std::vector<int>& pos,
              std::vector<int>& zero, std::vector<int>& neg, const char* family,
              std::vector<std::string>& sensitive) {
    if (value > eps)
        pos.push_back(index);
    else if (value < -eps)
        neg.push_back(index);
    else
        zero.push_back(index);
    if (std::fabs(std::fabs(value) - eps) <= eps) // within 2*eps of the band edge
        sensitive.push_back(std::string(family) + std::to_string(index) + " value " + fmt(value));
}

} // namespace

IndexPartition partition(const ProblemSpec& p, const Vec& x, double eps_part) {
    IndexPartition part;
    part.tolerance = eps_part;
    for (int k = 0; k < p.K(); ++k)
        classify(p.objective_terms[k].inner.eval(x), eps_part, k, part.k_pos, part.k_zero,
                 part.k_neg, "g", part.sensitive);
    for (int l = 0; l < p.L(); ++l)
        classify(p.constraint_terms[l].inner.eval(x), eps_part, l, part.l_pos, part.l_zero,
                 part.l_neg, "h", part.sensitive);
    return part;
}

double PulledDownProblem::objective(const Vec& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < objective_parts.size(); ++i)
        s += objective_coeffs[i] * objective_parts[i].eval(x);
    return s;
}

double PulledDownProblem::objective_dd(const Vec& x, const Vec& v, double eps_active) const {
    double s = 0.0;
    for (std::size_t i = 0; i < objective_parts.size(); ++i)
        s += objective_coeffs[i] * objective_parts[i].dir_deriv(x, v, eps_active);
    return s;
}

bool PulledDownProblem::feasible(const Vec& x, double tol) const {
    if (!base_set.contains(x, tol)) return false;
    for (const auto& c : constraints)
        if (!c.satisfied(x, tol)) return false;
    if (functional_row && functional_row->value(x) > functional_row->budget + tol) return false;
    return true;
}

PulledDownProblem build_pulled_down(const ProblemSpec& p, const IndexPartition& part,
                                    const Vec& anchor) {
    PulledDownProblem pd;
    pd.base_set = p.feasible_set;
    pd.anchor = anchor;
    pd.objective_parts.push_back(p.base_cost);
    pd.objective_coeffs.push_back(1.0);
    for (int k : part.k_pos) {
        pd.objective_parts.push_back(p.objective_terms[k].multiplier);
        pd.objective_coeffs.push_back(1.0);
    }
    auto add = [&pd](const FunctionHandle& fn, bool leq, std::string tag) {
        pd.constraints.push_back({fn, leq, std::move(tag)});
    };
    for (int k : part.k_zero) add(p.objective_terms[k].inner, true, "g" + std::to_string(k + 1) + "<=0 (zero)");
    for (int k : part.k_neg) add(p.objective_terms[k].inner, true, "g" + std::to_string(k + 1) + "<=0 (neg)");
    for (int k : part.k_pos) add(p.objective_terms[k].inner, false, "g" + std::to_string(k + 1) + ">=0 (pos)");
    for (int l : part.l_zero) add(p.constraint_terms[l].inner, true, "h" + std::to_string(l + 1) + "<=0 (zero)");
    for (int l : part.l_neg) add(p.constraint_terms[l].inner, true, "h" + std::to_string(l + 1) + "<=0 (neg)");
    for (int l : part.l_pos) add(p.constraint_terms[l].inner, false, "h" + std::to_string(l + 1) + ">=0 (pos)");
    if (p.has_functional_constraint()) {
        FunctionalRow row;
        row.budget = p.budget;
        for (int l : part.l_pos) {
            row.phis.push_back(p.constraint_terms[l].multiplier);
            row.coeffs.push_back(1.0);
        }
        pd.functional_row = std::move(row);
    }
    return pd;
}

ConeResult linearized_cone(const PulledDownProblem& pd, const Vec& x, const Tolerances& tol) {
    ConeResult out;
    ConeModel& cone = out.cone;
    cone.n = pd.base_set.n;
    cone.fixed = pd.base_set.tangent_rows(x, tol.eps_active);

    bool all_active_pa = true;
    for (const auto& c : pd.constraints) {
        double v = c.fn.eval(x);
        bool active = std::fabs(v) <= tol.eps_part;
        if (!active) continue;
        if (!c.fn.has_structure()) {
            cone.inconclusive = true;
            cone.note = "active constraint '" + c.fn.label + "' has no piece structure";
            continue;
        }
        PwlExpr dd = dd_model(c.fn, x, tol.eps_active);
        if (!c.leq) dd = PwlExpr::scaled(-1.0, dd);
        cone.constraints.push_back({std::move(dd)});
        all_active_pa = all_active_pa && c.fn.piecewise_affine();
    }

    bool functional_tight = false;
    if (pd.functional_row) {
        double v = pd.functional_row->value(x);
        functional_tight = v >= pd.functional_row->budget - tol.eps_part;
        if (functional_tight && !pd.functional_row->phis.empty()) {
            std::vector<PwlExpr> parts;
            for (std::size_t i = 0; i < pd.functional_row->phis.size(); ++i) {
                const FunctionHandle& phi = pd.functional_row->phis[i];
                if (!phi.has_structure()) {
                    cone.inconclusive = true;
                    cone.note = "functional-row multiplier '" + phi.label + "' has no structure";
                    continue;
                }
                parts.push_back(PwlExpr::scaled(pd.functional_row->coeffs[i],
                                                dd_model(phi, x, tol.eps_active)));
                all_active_pa = all_active_pa && phi.piecewise_affine();
            }
            if (!parts.empty()) cone.constraints.push_back({PwlExpr::sum(std::move(parts))});
        }
    }

    if (cone.inconclusive) {
        out.acq = AcqEvidence::None;
        return out;
    }
    if (all_active_pa) {
        out.acq = AcqEvidence::PiecewisePolyhedral;
        return out;
    }
    PwlMinimizeOptions opts;
    opts.branch_budget = tol.piece_budget;
    PwlMarginResult margin = max_margin_pwl(cone.fixed, cone.constraints, cone.n, opts);
    if (margin.margin > 1e-9) {
        out.acq = AcqEvidence::DirectionalSlater;
        out.slater_witness = margin.v;
    } else {
        out.acq = AcqEvidence::None;
    }
    return out;
}

namespace {

StationarityCertificate sample_directions(const PulledDownProblem& pd, const Vec& x,
                                          const ConeResult& cr, const Tolerances& tol,
                                          const std::string& why) {
    StationarityCertificate cert;
    cert.point = x;
    cert.method = CertMethod::DirectionSampling;
    cert.acq = cr.acq;
    cert.note = why + "; direction sampling fallback";
    const int n = pd.base_set.n;
    Rng rng(0x5eedULL + static_cast<std::uint64_t>(n));
    double best = 0.0;
    Vec best_v;
    int accepted = 0;
    auto value = [&pd](const Vec& y) { return pd.objective(y); };
    for (int s = 0; s < tol.n_dir_samples; ++s) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
        if (!pwl_cone_member(v, cr.cone.fixed, cr.cone.constraints, 1e-12)) continue;
        ++accepted;
        // blackbox parts admit evaluation only: estimate the one-sided dd
        double dd = fd_dir_derivative_oracle(value, x, v);
        if (dd < best) {
            best = dd;
            best_v = v;
        }
    }
    cert.min_dd = best;
    if (best < -tol.tol_stat) {
        cert.verdict = Verdict::Fails;
        cert.witness = best_v;
    } else {
        cert.verdict = Verdict::Inconclusive;
        cert.note += "; no descent found among " + std::to_string(accepted) + " cone samples";
    }
    return cert;
}

bool convex_like_flag(const PulledDownProblem& pd, const Vec& x, double eps_part) {
    for (const auto& part : pd.objective_parts)
        if (!part.declared_convex && !part.piecewise_affine()) return false;
    for (const auto& c : pd.constraints) {
        if (std::fabs(c.fn.eval(x)) > eps_part) continue;
        if (!c.fn.declared_convex && !c.fn.piecewise_affine()) return false;
    }
    if (pd.functional_row)
        for (const auto& phi : pd.functional_row->phis)
            if (!phi.declared_convex && !phi.piecewise_affine()) return false;
    return true;
}

} // namespace

StationarityCertificate certify_pulled_down(const PulledDownProblem& pd, const Vec& x,
                                            const Tolerances& tol) {
    if (!pd.feasible(x, tol.feas_tol))
        throw std::invalid_argument("certify: point is infeasible for the pulled-down problem");

    ConeResult cr = linearized_cone(pd, x, tol);
    StationarityCertificate cert;
    cert.point = x;
    cert.acq = cr.acq;

    if (cr.cone.inconclusive) {
        cert.verdict = Verdict::Inconclusive;
        cert.method = CertMethod::LinearizedLP;
        cert.note = cr.cone.note;
        return cert;
    }
    for (const auto& part : pd.objective_parts) {
        if (!part.has_structure())
            return sample_directions(pd, x, cr, tol,
                                     "objective part '" + part.label + "' has no structure");
    }

    std::vector<PwlExpr> parts;
    for (std::size_t i = 0; i < pd.objective_parts.size(); ++i)
        parts.push_back(PwlExpr::scaled(pd.objective_coeffs[i],
                                        dd_model(pd.objective_parts[i], x, tol.eps_active)));
    PwlExpr objective = PwlExpr::sum(std::move(parts));

    PwlMinimizeOptions opts;
    opts.branch_budget = tol.piece_budget;
    PwlMinimizeResult mr = minimize_pwl(objective, cr.cone.fixed, cr.cone.constraints,
                                        cr.cone.n, opts);
    if (!mr.exact) return sample_directions(pd, x, cr, tol, "piece budget exceeded");

    cert.method = mr.branches > 1 ? CertMethod::PieceEnumeration : CertMethod::LinearizedLP;
    cert.min_dd = mr.value;
    if (mr.value < -tol.tol_stat) {
        cert.verdict = Verdict::Fails;
        cert.witness = mr.v;
        return cert;
    }
    if (cr.acq != AcqEvidence::None) {
        cert.verdict = Verdict::PseudoBStationary;
        if (convex_like_flag(pd, x, tol.eps_part)) {
            cert.convex_like_upgrade = true;
            cert.note = "pseudo local minimizer (ACQ + convex-like objective/constraints)";
        }
    } else {
        cert.verdict = Verdict::LinearizedStationary;
        cert.note = "stationary w.r.t. the linearized cone only; no ACQ evidence, "
                    "necessary-condition check";
    }
    return cert;
}

StationarityCertificate check_pseudo_b_stationary(const ProblemSpec& p, const Vec& x,
                                                  const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    if (!canon.feasible(x, tol.feas_tol))
        throw std::invalid_argument("check_pseudo_b_stationary: infeasible point");
    IndexPartition part = partition(canon, x, tol.eps_part);
    PulledDownProblem pd = build_pulled_down(canon, part, x);
    return certify_pulled_down(pd, x, tol);
}

MultiplierReport enumerate_multiplier_family(const ProblemSpec& p, const Vec& x,
                                             MultiplierMode mode, const Tolerances& tol,
                                             int budget_bits) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    IndexPartition part = partition(canon, x, tol.eps_part);
    const int nk = static_cast<int>(part.k_zero.size());
    const int nl = static_cast<int>(part.l_zero.size());
    if (nk + nl > budget_bits)
        throw std::invalid_argument("multiplier enumeration: 2^" + std::to_string(nk + nl) +
                                    " subproblems exceed the budget 2^" +
                                    std::to_string(budget_bits));

    MultiplierReport report;
    report.mode = mode;

    if (mode == MultiplierMode::SufficientC) {
        for (int k : part.k_zero) {
            double v = canon.objective_terms[k].multiplier.eval(x);
            if (v < -tol.feas_tol) {
                report.precondition_ok = false;
                report.precondition_note +=
                    "phi_" + std::to_string(k + 1) + "(x)=" + fmt(v) + " < 0; ";
            }
        }
        for (int l : part.l_zero) {
            double v = canon.constraint_terms[l].multiplier.eval(x);
            if (v < -tol.feas_tol) {
                report.precondition_ok = false;
                report.precondition_note +=
                    "phi_c_" + std::to_string(l + 1) + "(x)=" + fmt(v) + " < 0; ";
            }
        }
    }

    const long total = 1L << (nk + nl);
    bool any_pass = false, all_pass = true;
    for (long mask = 0; mask < total; ++mask) {
        std::vector<int> xi(nk, 0), mu(nl, 0);
        for (int i = 0; i < nk; ++i) xi[i] = (mask >> i) & 1;
        for (int j = 0; j < nl; ++j) mu[j] = (mask >> (nk + j)) & 1;

        PulledDownProblem pd;
        pd.base_set = canon.feasible_set;
        pd.anchor = x;
        pd.objective_parts.push_back(canon.base_cost);
        pd.objective_coeffs.push_back(1.0);
        for (int k : part.k_pos) {
            pd.objective_parts.push_back(canon.objective_terms[k].multiplier);
            pd.objective_coeffs.push_back(1.0);
        }
        for (int i = 0; i < nk; ++i) {
            int k = part.k_zero[i];
            if (xi[i] == 0)
                pd.constraints.push_back(
                    {canon.objective_terms[k].inner, true, "g" + std::to_string(k + 1) + "<=0"});
            else if (mode == MultiplierMode::SufficientC) {
                pd.objective_parts.push_back(canon.objective_terms[k].multiplier);
                pd.objective_coeffs.push_back(1.0);
            }
        }
        for (int k : part.k_neg)
            pd.constraints.push_back(
                {canon.objective_terms[k].inner, true, "g" + std::to_string(k + 1) + "<=0"});
        for (int k : part.k_pos)
            pd.constraints.push_back(
                {canon.objective_terms[k].inner, false, "g" + std::to_string(k + 1) + ">=0"});
        for (int j = 0; j < nl; ++j) {
            int l = part.l_zero[j];
            if (mu[j] == 0)
                pd.constraints.push_back(
                    {canon.constraint_terms[l].inner, true, "h" + std::to_string(l + 1) + "<=0"});
        }
        for (int l : part.l_neg)
            pd.constraints.push_back(
                {canon.constraint_terms[l].inner, true, "h" + std::to_string(l + 1) + "<=0"});
        for (int l : part.l_pos)
            pd.constraints.push_back(
                {canon.constraint_terms[l].inner, false, "h" + std::to_string(l + 1) + ">=0"});
        if (canon.has_functional_constraint()) {
            FunctionalRow row;
            row.budget = canon.budget;
            for (int l : part.l_pos) {
                row.phis.push_back(canon.constraint_terms[l].multiplier);
                row.coeffs.push_back(1.0);
            }
            if (mode == MultiplierMode::SufficientC) {
                for (int j = 0; j < nl; ++j) {
                    if (mu[j] == 1) {
                        int l = part.l_zero[j];
                        row.phis.push_back(canon.constraint_terms[l].multiplier);
                        row.coeffs.push_back(1.0);
                    }
                }
            }
            pd.functional_row = std::move(row);
        }

        MultiplierEntry entry;
        entry.xi = xi;
        entry.mu = mu;
        if (!pd.feasible(x, tol.feas_tol)) {
            // SufficientC can move the anchor out of feasibility when the
            // charged functional row overshoots the budget.
            entry.verdict = Verdict::Fails;
            entry.min_dd = 0.0;
        } else {
            StationarityCertificate cert = certify_pulled_down(pd, x, tol);
            entry.verdict = cert.verdict;
            entry.min_dd = cert.min_dd;
        }
        any_pass = any_pass ||
                   (entry.verdict == Verdict::PseudoBStationary ||
                    entry.verdict == Verdict::LinearizedStationary);
        all_pass = all_pass &&
                   (entry.verdict == Verdict::PseudoBStationary ||
                    entry.verdict == Verdict::LinearizedStationary);
        report.entries.push_back(std::move(entry));
    }
    report.aggregate_pass = mode == MultiplierMode::Necessary ? any_pass : all_pass;
    return report;
}

namespace {

struct AffineForm {
    Vec a;
    double c = 0.0;
    bool ok = false;
};

AffineForm extract_affine(const FunctionHandle& f) {
    AffineForm out;
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

// {g <= 0} rows for convex piecewise-affine g (max of affine pieces, minus at
// most one affine piece folded in).
bool sublevel_rows(const FunctionHandle& g, std::vector<LinearRow>& rows) {
    if (!g.piecewise_affine()) return false;
    if (g.concave_parts().size() > 1) return false;
    Vec zero(g.dimension(), 0.0);
    Vec wa(g.dimension(), 0.0);
    double wc = 0.0;
    if (g.concave_parts().size() == 1) {
        wa = g.concave_parts()[0].gradient(zero);
        wc = g.concave_parts()[0].value(zero);
    }
    for (const auto& piece : g.convex_parts()) {
        Vec a = piece.gradient(zero);
        double c = piece.value(zero);
        rows.push_back({axpy(-1.0, wa, a), wc - c}); // (a - wa).x <= wc - c
    }
    return true;
}

std::vector<Vec> sample_zero_set(const FunctionHandle& g, const PolyhedralSet& X, int res) {
    // bisect sign changes of g along axis-parallel grid segments
    std::vector<Vec> points;
    if (!X.bounded()) return points;
    const int n = X.n;
    auto coord = [&](int axis, int i) {
        return X.lo[axis] + (X.hi[axis] - X.lo[axis]) * i / static_cast<double>(res);
    };
    for (int axis = 0; axis < n; ++axis) {
        std::vector<int> it(n, 0);
        for (;;) {
            if (it[axis] < res) { // segment start along `axis`
                Vec a(n), b(n);
                for (int d = 0; d < n; ++d) a[d] = b[d] = coord(d, it[d]);
                b[axis] = coord(axis, it[axis] + 1);
                double ga = g.eval(a), gb = g.eval(b);
                if (ga == 0.0 && X.contains(a)) points.push_back(a);
                if (((ga < 0) != (gb < 0)) && ga != 0.0 && gb != 0.0) {
                    for (int bisect = 0; bisect < 80; ++bisect) {
                        Vec mid = scaled(vsum(a, b), 0.5);
                        double gm = g.eval(mid);
                        if ((gm < 0) == (ga < 0)) {
                            a = mid;
                            ga = gm;
                        } else {
                            b = mid;
                            gb = gm;
                        }
                    }
                    Vec mid = scaled(vsum(a, b), 0.5);
                    if (X.contains(mid, 1e-9)) points.push_back(mid);
                }
            }
            int d = 0;
            for (; d < n; ++d) {
                if (++it[d] <= res) break;
                it[d] = 0;
            }
            if (d == n) break;
        }
    }
    return points;
}

SignRow sign_row_for(const FunctionHandle& phi, const FunctionHandle& g,
                     const PolyhedralSet& X, SignMode mode, Rng& rng, const Vec* center,
                     double radius, int grid_res) {
    SignRow row;
    // Constant multipliers decide immediately.
    if (phi.has_structure()) {
        AffineForm aphi = extract_affine(phi);
        if (aphi.ok && norm_inf(aphi.a) == 0.0) {
            row.exact = true;
            row.min_value = aphi.c;
            row.pass = aphi.c >= -1e-12;
            row.note = "constant multiplier";
            return row;
        }
        if (mode == SignMode::ZeroSet && aphi.ok) {
            AffineForm ag = extract_affine(g);
            if (ag.ok && X.bounded()) {
                LpProblem lp;
                lp.n = X.n;
                lp.c = aphi.a;
                lp.lo = X.lo;
                lp.hi = X.hi;
                for (const auto& r : X.inequalities) {
                    lp.rows.push_back(r.a);
                    lp.rhs.push_back(r.rhs);
                }
                lp.rows.push_back(ag.a);
                lp.rhs.push_back(-ag.c);
                lp.rows.push_back(scaled(ag.a, -1.0));
                lp.rhs.push_back(ag.c);
                LpResult lr = solve_lp(lp);
                if (lr.status == LpStatus::Infeasible) {
                    row.exact = true;
                    row.vacuous = true;
                    row.pass = true;
                    row.note = "zero set empty in X";
                    return row;
                }
                row.exact = true;
                row.min_value = lr.value + aphi.c;
                row.pass = row.min_value >= -1e-9;
                row.note = "LP on the affine zero set";
                return row;
            }
        }
        if (mode == SignMode::Sublevel && aphi.ok) {
            std::vector<LinearRow> rows;
            if (sublevel_rows(g, rows) && X.bounded()) {
                LpProblem lp;
                lp.n = X.n;
                lp.c = aphi.a;
                lp.lo = X.lo;
                lp.hi = X.hi;
                for (const auto& r : X.inequalities) {
                    lp.rows.push_back(r.a);
                    lp.rhs.push_back(r.rhs);
                }
                for (const auto& r : rows) {
                    lp.rows.push_back(r.a);
                    lp.rhs.push_back(r.rhs);
                }
                LpResult lr = solve_lp(lp);
                if (lr.status == LpStatus::Infeasible) {
                    row.exact = true;
                    row.vacuous = true;
                    row.pass = true;
                    row.note = "sublevel set empty in X";
                    return row;
                }
                row.exact = true;
                row.min_value = lr.value + aphi.c;
                row.pass = row.min_value >= -1e-9;
                row.note = "LP on the piecewise-affine sublevel set";
                return row;
            }
        }
    }

    // Sampled fallback.
    if (!X.bounded()) {
        row.pass = false;
        row.note = "unbounded set: cannot sample";
        return row;
    }
    double best = std::numeric_limits<double>::infinity();
    int hits = 0;
    if (mode == SignMode::ZeroSet) {
        for (const Vec& z : sample_zero_set(g, X, grid_res)) {
            best = std::min(best, phi.eval(z));
            ++hits;
        }
    } else {
        Vec blo, bhi;
        X.sampling_box(&blo, &bhi);
        for (int s = 0; s < grid_res * grid_res * 4; ++s) {
            Vec z = rng.uniform_vec(blo, bhi);
            if (!X.contains(z)) continue;
            if (mode == SignMode::Sublevel && g.eval(z) > 0.0) continue;
            if (mode == SignMode::Neighborhood) {
                if (!center) continue;
                if (dist_inf(z, *center) > radius) continue;
            }
            best = std::min(best, phi.eval(z));
            ++hits;
        }
    }
    if (hits == 0) {
        row.vacuous = true;
        row.pass = true;
        row.note = "no sample points on the target set";
        return row;
    }
    row.min_value = best;
    row.pass = best >= -1e-7;
    row.note = "sampled (" + std::to_string(hits) + " points), heuristic";
    return row;
}

} // namespace

SignConditionReport check_sign_conditions(const ProblemSpec& p, SignMode mode, Rng& rng,
                                          const Vec* center, double radius, int grid_res) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    SignConditionReport report;
    report.mode = mode;
    for (int k = 0; k < canon.K(); ++k) {
        SignRow row = sign_row_for(canon.objective_terms[k].multiplier,
                                   canon.objective_terms[k].inner, canon.feasible_set, mode,
                                   rng, center, radius, grid_res);
        row.constraint_side = false;
        row.term = k;
        report.rows.push_back(std::move(row));
    }
    for (int l = 0; l < canon.L(); ++l) {
        SignRow row = sign_row_for(canon.constraint_terms[l].multiplier,
                                   canon.constraint_terms[l].inner, canon.feasible_set, mode,
                                   rng, center, radius, grid_res);
        row.constraint_side = true;
        row.term = l;
        report.rows.push_back(std::move(row));
    }
    return report;
}

C4Report check_c4_sufficient(const ProblemSpec& p, const std::vector<Vec>& samples,
                             const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    C4Report report;
    for (const Vec& x : samples) {
        C4SampleRow row;
        row.x = x;
        if (!canon.feasible_set.contains(x, tol.feas_tol)) {
            report.rows.push_back(std::move(row));
            continue;
        }
        IndexPartition part = partition(canon, x, tol.eps_part);
        double pulled_value = 0.0;
        for (int l : part.l_pos) pulled_value += canon.constraint_terms[l].multiplier.eval(x);
        row.applicable = pulled_value > canon.budget + tol.feas_tol;
        if (!row.applicable) {
            report.rows.push_back(std::move(row));
            continue;
        }
        ++report.applicable;

        PulledDownProblem pd = build_pulled_down(canon, part, x);
        pd.functional_row.reset(); // the functional-free restriction
        ConeResult cr = linearized_cone(pd, x, tol);
        if (cr.cone.inconclusive) {
            report.rows.push_back(std::move(row));
            continue;
        }
        std::vector<PwlExpr> parts;
        for (int l : part.l_pos)
            parts.push_back(dd_model(canon.constraint_terms[l].multiplier, x, tol.eps_active));
        if (parts.empty()) {
            report.rows.push_back(std::move(row));
            continue;
        }
        PwlExpr objective = PwlExpr::sum(std::move(parts));
        PwlMinimizeOptions opts;
        opts.branch_budget = tol.piece_budget;
        PwlMinimizeResult mr =
            minimize_pwl(objective, cr.cone.fixed, cr.cone.constraints, cr.cone.n, opts);
        row.lp_value = mr.value;
        row.pass = mr.exact && mr.value <= -1.0 + 1e-6;
        row.direction = mr.v;
        double n2 = norm2(mr.v);
        row.euclid_value = n2 > 1e-12 ? mr.value / n2 : 0.0;
        if (row.pass) ++report.passed;
        report.rows.push_back(std::move(row));
    }
    return report;
}

bool reproduces_restricted_zero_problem(const ProblemSpec& p, const Vec& anchor,
                                        std::string* why, const Tolerances& tol) {
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return false;
    };
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    const int n = canon.dimension();
    if (canon.L() != 0) return fail("constraint terms present");

    // Recognize the two open terms per coordinate: +x_i and -x_i with equal
    // positive constant weights.
    struct CoordTerms {
        int plus = -1, minus = -1;
        double weight = 0.0;
    };
    std::vector<CoordTerms> coords(n);
    for (int k = 0; k < canon.K(); ++k) {
        AffineForm g;
        {
            const FunctionHandle& inner = canon.objective_terms[k].inner;
            if (!inner.piecewise_affine() || inner.convex_parts().size() != 1 ||
                !inner.concave_parts().empty())
                return fail("term " + std::to_string(k) + ": inner is not a signed coordinate");
            Vec zero(n, 0.0);
            g.a = inner.convex_parts()[0].gradient(zero);
            g.c = inner.convex_parts()[0].value(zero);
        }
        if (std::fabs(g.c) > 1e-12) return fail("inner has an offset");
        int axis = -1;
        double sign = 0.0;
        for (int i = 0; i < n; ++i) {
            if (g.a[i] == 0.0) continue;
            if (axis >= 0) return fail("inner involves several coordinates");
            axis = i;
            sign = g.a[i];
        }
        if (axis < 0 || std::fabs(std::fabs(sign) - 1.0) > 1e-12)
            return fail("inner is not a unit coordinate");
        if (sign > 0)
            coords[axis].plus = k;
        else
            coords[axis].minus = k;
    }
    IndexPartition part = partition(canon, anchor, tol.eps_part);
    PulledDownProblem pd = build_pulled_down(canon, part, anchor);

    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        if (std::fabs(anchor[i]) > tol.eps_part) margin = std::min(margin, std::fabs(anchor[i]));

    // The zero coordinates must produce exactly the pair x_i <= 0, -x_i <= 0,
    // and every other term row must be strictly inactive near the anchor.
    int zero_rows = 0;
    for (const auto& c : pd.constraints) {
        double val = c.fn.eval(anchor);
        if (std::fabs(val) <= tol.eps_part) {
            ++zero_rows;
        } else {
            double dist = std::fabs(val);
            if (dist < margin / 2.0)
                return fail("constraint '" + c.tag + "' active too close to the anchor");
        }
    }
    int expected = 0;
    for (int i = 0; i < n; ++i) {
        if (std::fabs(anchor[i]) <= tol.eps_part) {
            if (coords[i].plus < 0 || coords[i].minus < 0)
                return fail("zero coordinate " + std::to_string(i) + " lacks the +- pair");
            expected += 2;
        }
    }
    if (zero_rows != expected)
        return fail("zero-class rows " + std::to_string(zero_rows) + " != expected " +
                    std::to_string(expected));
    return true;
}

} // namespace hcopt
