#include "hcopt/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcopt {

namespace {

constexpr double kKinkTol = 1e-10; // activity band for the penalty hinge

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<ApproxFamily> broadcast(std::vector<ApproxFamily> fams, std::size_t count,
                                    const char* side) {
    if (count == 0) return {};
    if (fams.size() == count) return fams;
    if (fams.size() == 1) {
        std::vector<ApproxFamily> out(count, fams[0]);
        return out;
    }
    throw std::invalid_argument(std::string("approximated objective: ") + side +
                                " family count mismatch");
}

} // namespace

ApproximatedObjective make_approximated_objective(const ProblemSpec& p,
                                                  std::vector<ApproxFamily> obj_families,
                                                  std::vector<ApproxFamily> con_families,
                                                  double lambda, double delta) {
    ApproximatedObjective a;
    a.problem = is_canonical(p) ? p : canonicalize(p);
    a.obj_families = broadcast(std::move(obj_families), a.problem.objective_terms.size(), "objective");
    a.con_families = broadcast(std::move(con_families), a.problem.constraint_terms.size(), "constraint");
    a.lambda = lambda;
    a.delta = delta;
    if (delta <= 0.0) throw std::invalid_argument("approximated objective: delta must be positive");
    return a;
}

double ApproximatedObjective::constraint_aggregate(const Vec& x) const {
    double s = -problem.budget;
    for (std::size_t l = 0; l < problem.constraint_terms.size(); ++l) {
        const HeavisideTerm& t = problem.constraint_terms[l];
        s += t.multiplier.eval(x) * con_families[l].theta(t.inner.eval(x), delta);
    }
    return s;
}

double ApproximatedObjective::value(const Vec& x) const {
    double s = problem.base_cost.eval(x);
    for (std::size_t k = 0; k < problem.objective_terms.size(); ++k) {
        const HeavisideTerm& t = problem.objective_terms[k];
        s += t.multiplier.eval(x) * obj_families[k].theta(t.inner.eval(x), delta);
    }
    if (!problem.constraint_terms.empty())
        s += lambda * std::max(constraint_aggregate(x), 0.0);
    return s;
}

namespace {

// phi' * theta + phi * theta'(g; g'(v)) for one term.
double term_dd(const HeavisideTerm& t, const ApproxFamily& fam, double delta, const Vec& x,
               const Vec& v, double eps_active) {
    double g = t.inner.eval(x);
    double theta = fam.theta(g, delta);
    double s = 0.0;
    if (theta != 0.0) s += t.multiplier.dir_deriv(x, v, eps_active) * theta;
    double gdd = t.inner.dir_deriv(x, v, eps_active);
    double theta_dd = fam.dd(g, delta, gdd);
    if (theta_dd != 0.0) s += t.multiplier.eval(x) * theta_dd;
    return s;
}

} // namespace

double ApproximatedObjective::dd(const Vec& x, const Vec& v, double eps_active) const {
    double s = problem.base_cost.dir_deriv(x, v, eps_active);
    for (std::size_t k = 0; k < problem.objective_terms.size(); ++k)
        s += term_dd(problem.objective_terms[k], obj_families[k], delta, x, v, eps_active);
    if (!problem.constraint_terms.empty()) {
        double p = constraint_aggregate(x);
        if (p > kKinkTol || std::fabs(p) <= kKinkTol) {
            double pdd = 0.0;
            for (std::size_t l = 0; l < problem.constraint_terms.size(); ++l)
                pdd += term_dd(problem.constraint_terms[l], con_families[l], delta, x, v,
                               eps_active);
            s += lambda * (p > kKinkTol ? pdd : std::max(pdd, 0.0));
        }
    }
    return s;
}

namespace {

// The pwl pieces of one term's dd in v:
//   theta * dd(phi) + (phi * ddp) [dd(g)]_+ + (-phi * dm) [-dd(g)]_+
void append_term_model(std::vector<PwlExpr>& parts, const HeavisideTerm& t,
                       const ApproxFamily& fam, double delta, const Vec& x, double eps_active,
                       double outer_scale) {
    double g = t.inner.eval(x);
    double theta = fam.theta(g, delta);
    if (theta != 0.0)
        parts.push_back(PwlExpr::scaled(outer_scale * theta, dd_model(t.multiplier, x, eps_active)));
    double phi = t.multiplier.eval(x);
    if (phi == 0.0) return;
    double ddp = fam.dd_plus(g, delta);
    double dm = -fam.dd_minus(g, delta);
    if (ddp != 0.0)
        parts.push_back(PwlExpr::scaled(outer_scale * phi * ddp,
                                        PwlExpr::plus_part(dd_model(t.inner, x, eps_active))));
    if (dm != 0.0)
        parts.push_back(PwlExpr::scaled(
            outer_scale * -phi * dm,
            PwlExpr::plus_part(PwlExpr::scaled(-1.0, dd_model(t.inner, x, eps_active)))));
}

} // namespace

PwlExpr ApproximatedObjective::direction_model(const Vec& x, double eps_active) const {
    std::vector<PwlExpr> parts;
    parts.push_back(dd_model(problem.base_cost, x, eps_active));
    for (std::size_t k = 0; k < problem.objective_terms.size(); ++k)
        append_term_model(parts, problem.objective_terms[k], obj_families[k], delta, x,
                          eps_active, 1.0);
    if (!problem.constraint_terms.empty()) {
        double p = constraint_aggregate(x);
        if (p > kKinkTol) {
            for (std::size_t l = 0; l < problem.constraint_terms.size(); ++l)
                append_term_model(parts, problem.constraint_terms[l], con_families[l], delta, x,
                                  eps_active, lambda);
        } else if (std::fabs(p) <= kKinkTol) {
            std::vector<PwlExpr> pen;
            for (std::size_t l = 0; l < problem.constraint_terms.size(); ++l)
                append_term_model(pen, problem.constraint_terms[l], con_families[l], delta, x,
                                  eps_active, 1.0);
            if (!pen.empty())
                parts.push_back(
                    PwlExpr::scaled(lambda, PwlExpr::plus_part(PwlExpr::sum(std::move(pen)))));
        }
    }
    return PwlExpr::sum(std::move(parts));
}

InnerReport inner_solve(const NlpObjective& obj, const PolyhedralSet& X,
                        const std::vector<SignedConstraint>& extra, const Vec& x0,
                        const InnerStop& stop, double eps_active) {
    InnerReport rep;
    Vec x = x0;
    if (!X.contains(x, 1e-9)) throw std::invalid_argument("inner_solve: start outside the set");
    for (const auto& c : extra)
        if (!c.satisfied(x, 1e-9))
            throw std::invalid_argument("inner_solve: start violates '" + c.tag + "'");

    PwlMinimizeOptions opts;
    opts.branch_budget = stop.piece_budget;

    for (rep.iterations = 0; rep.iterations < stop.max_iter; ++rep.iterations) {
        std::vector<LinearRow> fixed = X.tangent_rows(x, 1e-9);
        std::vector<PwlConstraint> cons;
        for (const auto& c : extra) {
            double v = c.fn.eval(x);
            bool active = c.leq ? v >= -stop.constraint_act_tol : v <= stop.constraint_act_tol;
            if (!active) continue;
            PwlExpr dd = dd_model(c.fn, x, eps_active);
            if (!c.leq) dd = PwlExpr::scaled(-1.0, dd);
            cons.push_back({std::move(dd)});
        }
        PwlExpr model = obj.direction_model(x);
        PwlMinimizeResult mr = minimize_pwl(model, fixed, cons, X.n, opts);
        rep.dd_lp = mr.value;
        rep.model_exact = rep.model_exact && mr.exact;
        if (mr.value >= -stop.dd_tol) {
            rep.converged = true;
            break;
        }
        const Vec v = mr.v;
        double exact_dd = obj.dd(x, v);
        if (exact_dd > -stop.dd_tol * 0.1) {
            // model descent not realized by the exact dd (majorant path)
            rep.note = "model descent not confirmed by the exact dd";
            break;
        }
        double tau = std::min(1.0, X.max_step(x, v));
        bool stepped = false;
        double fx = obj.value(x);
        while (tau >= stop.step_min) {
            Vec trial = axpy(tau, v, x);
            bool ok = X.contains(trial, 1e-12);
            for (const auto& c : extra)
                if (ok && !c.satisfied(trial, 1e-12)) ok = false;
            if (ok && obj.value(trial) <= fx + stop.armijo_c1 * tau * exact_dd) {
                x = std::move(trial);
                stepped = true;
                break;
            }
            tau *= stop.backtrack;
        }
        if (!stepped) {
            rep.note = "line search stalled";
            break;
        }
    }
    rep.x = x;
    rep.objective = obj.value(x);
    if (!rep.converged && rep.note.empty()) rep.note = "iteration limit reached";
    return rep;
}

ContinuationTrace run_continuation(const ProblemSpec& p, std::vector<ApproxFamily> obj_families,
                                   std::vector<ApproxFamily> con_families, double lambda,
                                   const ContinuationSchedule& schedule, const Vec& x0,
                                   const InnerStop& stop, const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    std::vector<ApproxFamily> ofams =
        broadcast(std::move(obj_families), canon.objective_terms.size(), "objective");
    std::vector<ApproxFamily> cfams =
        broadcast(std::move(con_families), canon.constraint_terms.size(), "constraint");
    for (const auto& f : ofams)
        if (!axiom_suite(f).all_pass())
            throw std::invalid_argument("run_continuation: family '" + f.label +
                                        "' fails the axiom suite");
    for (const auto& f : cfams)
        if (!axiom_suite(f).all_pass())
            throw std::invalid_argument("run_continuation: family '" + f.label +
                                        "' fails the axiom suite");

    ContinuationTrace trace;
    Vec x = x0;
    double delta = schedule.delta0;
    for (int stage = 0; stage < schedule.stages; ++stage) {
        ApproximatedObjective aobj =
            make_approximated_objective(canon, ofams, cfams, lambda, delta);
        NlpObjective nlp;
        nlp.value = [&aobj](const Vec& y) { return aobj.value(y); };
        nlp.dd = [&aobj](const Vec& y, const Vec& v) { return aobj.dd(y, v); };
        nlp.direction_model = [&aobj](const Vec& y) { return aobj.direction_model(y); };
        InnerReport ir = inner_solve(nlp, canon.feasible_set, {}, x, stop);

        StageRecord rec;
        rec.delta = delta;
        rec.x = ir.x;
        rec.iterations = ir.iterations;
        rec.objective = ir.objective;
        rec.dd_lp = ir.dd_lp;
        rec.converged = ir.converged;
        for (std::size_t k = 0; k < canon.objective_terms.size(); ++k)
            rec.theta_obj.push_back(
                ofams[k].theta(canon.objective_terms[k].inner.eval(ir.x), delta));
        for (std::size_t l = 0; l < canon.constraint_terms.size(); ++l)
            rec.theta_con.push_back(
                cfams[l].theta(canon.constraint_terms[l].inner.eval(ir.x), delta));
        trace.stages.push_back(std::move(rec));
        x = ir.x;
        delta *= schedule.rho;
    }
    trace.limit = x;

    const int S = static_cast<int>(trace.stages.size());
    trace.x_converged = S >= 3;
    for (int s = std::max(1, S - 3); s < S && trace.x_converged; ++s)
        if (dist_inf(trace.stages[s].x, trace.stages[s - 1].x) > schedule.x_tol)
            trace.x_converged = false;

    IndexPartition part = partition(canon, x, tol.eps_part);
    trace.zero_k = part.k_zero;
    trace.zero_l = part.l_zero;
    auto mean_tail = [&](auto pick) {
        double s = 0.0;
        int count = 0;
        for (int v = std::max(0, S - 3); v < S; ++v, ++count) s += pick(trace.stages[v]);
        return count ? s / count : 0.0;
    };
    for (int k : trace.zero_k)
        trace.xi_star.push_back(mean_tail([k](const StageRecord& r) { return r.theta_obj[k]; }));
    for (int l : trace.zero_l)
        trace.mu_star.push_back(mean_tail([l](const StageRecord& r) { return r.theta_con[l]; }));

    // Feasibility of the limit in the pulled sense: positive-class terms only,
    // so a limit sitting a rounding error off a zero set is not misread.
    trace.functional_value_at_limit = 0.0;
    for (int l : part.l_pos)
        trace.functional_value_at_limit += canon.constraint_terms[l].multiplier.eval(x);
    trace.functional_feasible_at_limit =
        !canon.has_functional_constraint() ||
        trace.functional_value_at_limit <= canon.budget + tol.feas_tol;
    if (!trace.functional_feasible_at_limit)
        trace.note = "limit violates the functional constraint (penalty too weak?)";
    return trace;
}

ConditionReport diagnose_conditions(const ContinuationTrace& trace, const ProblemSpec& p,
                                    Rng& rng, const Tolerances& tol, double c3_tol,
                                    double c1_radius) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    ConditionReport report;
    const Vec& xs = trace.limit;

    { // (C1): zero-class multipliers nonnegative near the limit
        ConditionEntry e{"C1", CondStatus::Pass, ""};
        bool any = false;
        for (int k : trace.zero_k) {
            any = true;
            const FunctionHandle& phi = canon.objective_terms[k].multiplier;
            double best = std::numeric_limits<double>::infinity();
            for (int s = 0; s < 400; ++s) {
                Vec y(xs.size());
                for (std::size_t d = 0; d < xs.size(); ++d)
                    y[d] = xs[d] + rng.uniform(-c1_radius, c1_radius);
                if (!canon.feasible_set.contains(y, 1e-9)) continue;
                best = std::min(best, phi.eval(y));
            }
            best = std::min(best, phi.eval(xs));
            if (best < -1e-7) {
                e.status = CondStatus::Fail;
                e.detail += "phi_" + std::to_string(k + 1) + " min " + fmt(best) + "; ";
            }
        }
        for (int l : trace.zero_l) {
            any = true;
            const FunctionHandle& phi = canon.constraint_terms[l].multiplier;
            double best = phi.eval(xs);
            for (int s = 0; s < 400; ++s) {
                Vec y(xs.size());
                for (std::size_t d = 0; d < xs.size(); ++d)
                    y[d] = xs[d] + rng.uniform(-c1_radius, c1_radius);
                if (!canon.feasible_set.contains(y, 1e-9)) continue;
                best = std::min(best, phi.eval(y));
            }
            if (best < -1e-7) {
                e.status = CondStatus::Fail;
                e.detail += "phi_c_" + std::to_string(l + 1) + " min " + fmt(best) + "; ";
            }
        }
        if (!any) e.detail = "no zero-class terms at the limit";
        report.entries.push_back(std::move(e));
    }

    { // (C2): zero-class inners convex piecewise affine, else sampled implication
        ConditionEntry e{"C2", CondStatus::Pass, ""};
        std::vector<const FunctionHandle*> inners;
        for (int k : trace.zero_k) inners.push_back(&canon.objective_terms[k].inner);
        for (int l : trace.zero_l) inners.push_back(&canon.constraint_terms[l].inner);
        bool all_cpa = true;
        for (const FunctionHandle* g : inners)
            all_cpa = all_cpa && g->piecewise_affine() && g->convex_structured();
        if (inners.empty()) {
            e.detail = "no zero-class terms at the limit";
        } else if (all_cpa) {
            e.detail = "zero-class inners are convex piecewise affine";
        } else {
            // sampled implication over cone directions and nearby points
            std::vector<PwlConstraint> cone;
            for (const FunctionHandle* g : inners)
                cone.push_back({dd_model(*g, xs, tol.eps_active)});
            std::vector<LinearRow> fixed = canon.feasible_set.tangent_rows(xs, 1e-9);
            bool violated = false;
            int tested = 0;
            for (int s = 0; s < 600 && !violated; ++s) {
                Vec v(xs.size());
                for (auto& vi : v) vi = rng.uniform(-1, 1);
                if (!pwl_cone_member(v, fixed, cone, 1e-10)) continue;
                ++tested;
                Vec y(xs.size());
                for (std::size_t d = 0; d < xs.size(); ++d)
                    y[d] = xs[d] + rng.uniform(-1e-3, 1e-3);
                for (const FunctionHandle* g : inners)
                    if (g->dir_deriv(y, v, tol.eps_active) > 1e-7) violated = true;
            }
            if (violated)
                e.status = CondStatus::Fail;
            else if (tested == 0)
                e.status = CondStatus::Unverified;
            else
                e.detail = "sampled implication held on " + std::to_string(tested) + " directions";
        }
        report.entries.push_back(std::move(e));
    }

    { // (C3): recorded zero-class theta sequences vanish
        ConditionEntry e{"C3", CondStatus::Pass, ""};
        const int S = static_cast<int>(trace.stages.size());
        auto check_seq = [&](int idx, bool constraint_side) {
            double final_v = constraint_side ? trace.stages[S - 1].theta_con[idx]
                                             : trace.stages[S - 1].theta_obj[idx];
            bool decreasing = true;
            for (int s = std::max(1, S - 3); s < S; ++s) {
                double prev = constraint_side ? trace.stages[s - 1].theta_con[idx]
                                              : trace.stages[s - 1].theta_obj[idx];
                double cur = constraint_side ? trace.stages[s].theta_con[idx]
                                             : trace.stages[s].theta_obj[idx];
                if (cur > prev + 1e-9) decreasing = false;
            }
            if (final_v > c3_tol || !decreasing) {
                e.status = CondStatus::Fail;
                e.detail += (constraint_side ? "theta_c_" : "theta_") + std::to_string(idx + 1) +
                            " final " + fmt(final_v) + "; ";
            }
        };
        if (S > 0) {
            for (int k : trace.zero_k) check_seq(k, false);
            for (int l : trace.zero_l) check_seq(l, true);
        }
        if (trace.zero_k.empty() && trace.zero_l.empty())
            e.detail = "no zero-class terms at the limit";
        report.entries.push_back(std::move(e));
    }

    { // (C4): descent at infeasible stage iterates, when any exist
        ConditionEntry e{"C4", CondStatus::NotApplicable, "no infeasible stage iterates"};
        std::vector<Vec> infeasible;
        for (const auto& rec : trace.stages) {
            if (canon.has_functional_constraint() &&
                canon.functional_value(rec.x) > canon.budget + tol.feas_tol)
                infeasible.push_back(rec.x);
        }
        if (!infeasible.empty()) {
            C4Report c4 = check_c4_sufficient(canon, infeasible, tol);
            e.status = c4.applicable == c4.passed ? CondStatus::Pass : CondStatus::Fail;
            e.detail = std::to_string(c4.passed) + "/" + std::to_string(c4.applicable) +
                       " infeasible iterates admit the unit descent";
        }
        report.entries.push_back(std::move(e));
    }

    { // (C5): smooth or declared-convex positive-class data
        ConditionEntry e{"C5", CondStatus::Pass, ""};
        IndexPartition part = partition(canon, xs, tol.eps_part);
        auto regular = [](const FunctionHandle& f) {
            return f.structure() == FuncStructure::Smooth || f.declared_convex;
        };
        if (!regular(canon.base_cost)) {
            e.status = CondStatus::Unverified;
            e.detail += "base cost; ";
        }
        for (int k : part.k_pos)
            if (!regular(canon.objective_terms[k].multiplier)) {
                e.status = CondStatus::Unverified;
                e.detail += "phi_" + std::to_string(k + 1) + "; ";
            }
        for (int l : part.l_pos)
            if (!regular(canon.constraint_terms[l].multiplier)) {
                e.status = CondStatus::Unverified;
                e.detail += "phi_c_" + std::to_string(l + 1) + "; ";
            }
        if (e.status == CondStatus::Pass) e.detail = "smooth / declared convex";
        report.entries.push_back(std::move(e));
    }
    return report;
}

WeakPseudoReport weak_pseudo_report(const ContinuationTrace& trace, const ProblemSpec& p,
                                    const Tolerances& tol) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    WeakPseudoReport out;
    out.applicable = true;
    out.xi_star = trace.xi_star;
    out.mu_star = trace.mu_star;
    out.budget = canon.budget;

    const Vec& xs = trace.limit;
    IndexPartition part = partition(canon, xs, tol.eps_part);

    PulledDownProblem pd;
    pd.base_set = canon.feasible_set;
    pd.anchor = xs;
    pd.objective_parts.push_back(canon.base_cost);
    pd.objective_coeffs.push_back(1.0);
    for (int k : part.k_pos) {
        pd.objective_parts.push_back(canon.objective_terms[k].multiplier);
        pd.objective_coeffs.push_back(1.0);
    }
    for (std::size_t i = 0; i < part.k_zero.size(); ++i) {
        double xi = i < trace.xi_star.size() ? trace.xi_star[i] : 0.0;
        if (xi != 0.0) {
            pd.objective_parts.push_back(canon.objective_terms[part.k_zero[i]].multiplier);
            pd.objective_coeffs.push_back(xi);
        }
    }
    auto add = [&pd](const FunctionHandle& fn, bool leq, std::string tag) {
        pd.constraints.push_back({fn, leq, std::move(tag)});
    };
    for (int k : part.k_zero) add(canon.objective_terms[k].inner, true, "g<=0");
    for (int k : part.k_neg) add(canon.objective_terms[k].inner, true, "g<=0");
    for (int k : part.k_pos) add(canon.objective_terms[k].inner, false, "g>=0");
    for (int l : part.l_zero) add(canon.constraint_terms[l].inner, true, "h<=0");
    for (int l : part.l_neg) add(canon.constraint_terms[l].inner, true, "h<=0");
    for (int l : part.l_pos) add(canon.constraint_terms[l].inner, false, "h>=0");
    if (canon.has_functional_constraint()) {
        FunctionalRow row;
        row.budget = canon.budget;
        for (int l : part.l_pos) {
            row.phis.push_back(canon.constraint_terms[l].multiplier);
            row.coeffs.push_back(1.0);
        }
        for (std::size_t i = 0; i < part.l_zero.size(); ++i) {
            double mu = i < trace.mu_star.size() ? trace.mu_star[i] : 0.0;
            if (mu != 0.0) {
                row.phis.push_back(canon.constraint_terms[part.l_zero[i]].multiplier);
                row.coeffs.push_back(mu);
            }
        }
        pd.functional_row = row;
        out.weak_row_value = row.value(xs);
        out.weak_row_satisfied = out.weak_row_value <= canon.budget + 1e-6;
    } else {
        out.weak_row_satisfied = true;
    }

    // (C4') strengthened descent over the functional-free restriction
    if (canon.has_functional_constraint()) {
        PulledDownProblem hat = build_pulled_down(canon, part, xs);
        hat.functional_row.reset();
        ConeResult cr = linearized_cone(hat, xs, tol);
        std::vector<PwlExpr> parts;
        for (int l : part.l_pos)
            parts.push_back(dd_model(canon.constraint_terms[l].multiplier, xs, tol.eps_active));
        for (int l : part.l_zero)
            parts.push_back(PwlExpr::plus_part(
                dd_model(canon.constraint_terms[l].multiplier, xs, tol.eps_active)));
        if (!parts.empty() && !cr.cone.inconclusive) {
            PwlMinimizeOptions opts;
            opts.branch_budget = tol.piece_budget;
            PwlMinimizeResult mr =
                minimize_pwl(PwlExpr::sum(std::move(parts)), cr.cone.fixed,
                             cr.cone.constraints, cr.cone.n, opts);
            out.c4prime_value = mr.value;
            out.c4prime_pass = mr.exact && mr.value <= -1.0 + 1e-6;
        }
    }

    // (C5') regularity including the zero-class multipliers
    out.c5prime_pass = true;
    auto regular = [](const FunctionHandle& f) {
        return f.structure() == FuncStructure::Smooth || f.declared_convex;
    };
    if (!regular(canon.base_cost)) out.c5prime_pass = false;
    for (int k : part.k_pos)
        if (!regular(canon.objective_terms[k].multiplier)) out.c5prime_pass = false;
    for (int k : part.k_zero)
        if (!regular(canon.objective_terms[k].multiplier)) out.c5prime_pass = false;
    for (int l : part.l_pos)
        if (!regular(canon.constraint_terms[l].multiplier)) out.c5prime_pass = false;
    for (int l : part.l_zero)
        if (!regular(canon.constraint_terms[l].multiplier)) out.c5prime_pass = false;

    if (pd.feasible(xs, tol.feas_tol)) {
        out.certificate = certify_pulled_down(pd, xs, tol);
    } else {
        out.certificate.verdict = Verdict::Inconclusive;
        out.certificate.note = "limit infeasible for the weak multiplier problem";
    }
    return out;
}

} // namespace hcopt
