#ifndef HCOPT_CONTINUATION_HPP
#define HCOPT_CONTINUATION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcopt/approx.hpp"
#include "hcopt/model.hpp"
#include "hcopt/pwl.hpp"
#include "hcopt/stationarity.hpp"

namespace hcopt {

// Penalized approximated objective
//   c(x) + sum_k phi_k(x) theta_k(g_k(x), delta)
//        + lambda * max(sum_l phi_l(x) theta_l(h_l(x), delta) - b, 0).
// Values are exact; directional derivatives come from the product/chain rule
// with the families' one-sided derivatives.
struct ApproximatedObjective {
    ProblemSpec problem; // canonical (open terms only)
    std::vector<ApproxFamily> obj_families;
    std::vector<ApproxFamily> con_families;
    double lambda = 0.0;
    double delta = 0.0;

    double value(const Vec& x) const;
    double constraint_aggregate(const Vec& x) const; // sum phi_l theta_l - b
    double dd(const Vec& x, const Vec& v, double eps_active = 1e-9) const;
    PwlExpr direction_model(const Vec& x, double eps_active = 1e-9) const;
};

ApproximatedObjective make_approximated_objective(const ProblemSpec& p,
                                                  std::vector<ApproxFamily> obj_families,
                                                  std::vector<ApproxFamily> con_families,
                                                  double lambda, double delta);

struct NlpObjective {
    std::function<double(const Vec&)> value;
    std::function<double(const Vec&, const Vec&)> dd;
    std::function<PwlExpr(const Vec&)> direction_model;
};

struct InnerStop {
    int max_iter = 400;
    double dd_tol = 1e-8;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double step_min = 1e-14;
    int piece_budget = 4096;
    double constraint_act_tol = 1e-8;
};

struct InnerReport {
    Vec x;
    double objective = 0.0;
    double dd_lp = 0.0; // final direction-LP value
    int iterations = 0;
    bool converged = false;
    bool model_exact = true;
    std::string note;
};

// Projected directional descent: LP direction finding over the feasible
// directions of X (plus any active side constraints), Armijo backtracking on
// the exact objective along the ray. Fixed points are dd_tol-approximate
// d-stationary points of the piecewise-linear model.
InnerReport inner_solve(const NlpObjective& obj, const PolyhedralSet& X,
                        const std::vector<SignedConstraint>& extra, const Vec& x0,
                        const InnerStop& stop = {}, double eps_active = 1e-9);

struct ContinuationSchedule {
    double delta0 = 0.5;
    double rho = 0.5;
    int stages = 24;
    double x_tol = 1e-7;
};

struct StageRecord {
    double delta = 0.0;
    Vec x;
    int iterations = 0;
    double objective = 0.0; // approximated objective at the stage solution
    double dd_lp = 0.0;
    bool converged = false;
    std::vector<double> theta_obj; // theta_k(g_k(x), delta) per objective term
    std::vector<double> theta_con;
};

struct ContinuationTrace {
    std::vector<StageRecord> stages;
    Vec limit;
    bool x_converged = false;
    std::vector<int> zero_k, zero_l;  // zero classes at the limit
    std::vector<double> xi_star;      // accumulation estimates on zero_k
    std::vector<double> mu_star;      // accumulation estimates on zero_l
    double functional_value_at_limit = 0.0;
    bool functional_feasible_at_limit = true;
    std::string note;
};

// Warm-started stage solves at delta_v = delta0 * rho^v. Families may be
// given per term or as a single entry broadcast to every term.
ContinuationTrace run_continuation(const ProblemSpec& p, std::vector<ApproxFamily> obj_families,
                                   std::vector<ApproxFamily> con_families, double lambda,
                                   const ContinuationSchedule& schedule, const Vec& x0,
                                   const InnerStop& stop = {}, const Tolerances& tol = {});

enum class CondStatus { Pass, Fail, Unverified, NotApplicable };

struct ConditionEntry {
    std::string name;
    CondStatus status = CondStatus::Unverified;
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionEntry> entries;
    const ConditionEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
    bool passed(const std::string& name) const {
        const ConditionEntry* e = find(name);
        return e && e->status == CondStatus::Pass;
    }
};

// Post-hoc (C1)-(C5) diagnostics on a finished trace. Every condition is
// reported Pass/Fail/Unverified, never silently assumed.
ConditionReport diagnose_conditions(const ContinuationTrace& trace, const ProblemSpec& p,
                                    Rng& rng, const Tolerances& tol = {},
                                    double c3_tol = 1e-3, double c1_radius = 1e-2);

struct WeakPseudoReport {
    bool applicable = false;
    std::vector<double> xi_star, mu_star;
    double weak_row_value = 0.0;
    double budget = 0.0;
    bool weak_row_satisfied = false;
    bool c4prime_pass = false;
    double c4prime_value = 0.0;
    bool c5prime_pass = false;
    StationarityCertificate certificate;
};

// The downgrade path when (C3) fails: B-stationarity of the limit for the
// [0,1]-multiplier relaxation, with the strengthened descent and regularity
// flags reported alongside.
WeakPseudoReport weak_pseudo_report(const ContinuationTrace& trace, const ProblemSpec& p,
                                    const Tolerances& tol = {});

} // namespace hcopt

#endif
