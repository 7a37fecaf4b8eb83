#ifndef HCOPT_STATIONARITY_HPP
#define HCOPT_STATIONARITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hcopt/model.hpp"
#include "hcopt/pwl.hpp"
#include "hcopt/rng.hpp"

namespace hcopt {

struct Tolerances {
    double eps_part = 1e-7;   // zero-class band on inner values; the single
                              // most consequential tolerance: misclassifying a
                              // term changes the pulled-down problem discretely
    double eps_active = 1e-9; // piece-activity band inside handles
    double tol_stat = 1e-8;   // stationarity threshold on the LP value
    double feas_tol = 1e-7;
    int piece_budget = 4096;
    int n_dir_samples = 2000;
};

// Sign classes of the inner functions at a point; values within eps_part of
// zero land in the zero class.
struct IndexPartition {
    std::vector<int> k_pos, k_zero, k_neg;
    std::vector<int> l_pos, l_zero, l_neg;
    double tolerance = 0.0;
    std::vector<std::string> sensitive; // memberships within 2*eps of the band edge
};

IndexPartition partition(const ProblemSpec& p, const Vec& x, double eps_part = 1e-7);

struct SignedConstraint {
    FunctionHandle fn;
    bool leq = true; // fn <= 0 when true, fn >= 0 otherwise
    std::string tag;

    bool satisfied(const Vec& x, double tol) const {
        double v = fn.eval(x);
        return leq ? v <= tol : v >= -tol;
    }
};

struct FunctionalRow {
    std::vector<FunctionHandle> phis;
    std::vector<double> coeffs; // weights on the phis (1 except weak-form mu*)
    double budget = 0.0;

    double value(const Vec& x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < phis.size(); ++i) s += coeffs[i] * phis[i].eval(x);
        return s;
    }
};

// The hard-constrained restriction anchored at a point: indicators frozen by
// sign class, actives kept as inequalities, the functional constraint pulled
// down to the positive-class sum.
struct PulledDownProblem {
    std::vector<FunctionHandle> objective_parts;
    std::vector<double> objective_coeffs;
    std::vector<SignedConstraint> constraints;
    std::optional<FunctionalRow> functional_row;
    PolyhedralSet base_set;
    Vec anchor;

    double objective(const Vec& x) const;
    double objective_dd(const Vec& x, const Vec& v, double eps_active) const;
    bool feasible(const Vec& x, double tol) const;
};

PulledDownProblem build_pulled_down(const ProblemSpec& p, const IndexPartition& part,
                                    const Vec& anchor);

enum class AcqEvidence { PiecewisePolyhedral, DirectionalSlater, None };

struct ConeModel {
    int n = 0;
    std::vector<LinearRow> fixed;           // tangent rows of X
    std::vector<PwlConstraint> constraints; // dd rows of active constraints
    bool inconclusive = false;
    std::string note;
};

struct ConeResult {
    ConeModel cone;
    AcqEvidence acq = AcqEvidence::None;
    Vec slater_witness;
};

// Feasible-direction relaxation at x: active rows of X, dd rows of active
// pulled-down constraints, and the functional-row dd only when that row is
// tight. Nonstructured active functions make the cone inconclusive.
ConeResult linearized_cone(const PulledDownProblem& pd, const Vec& x,
                           const Tolerances& tol = {});

enum class Verdict { PseudoBStationary, LinearizedStationary, Fails, Inconclusive };
enum class CertMethod { LinearizedLP, PieceEnumeration, DirectionSampling };

struct StationarityCertificate {
    Vec point;
    Verdict verdict = Verdict::Inconclusive;
    CertMethod method = CertMethod::LinearizedLP;
    AcqEvidence acq = AcqEvidence::None;
    double min_dd = 0.0;
    Vec witness; // descent direction when the check fails
    bool convex_like_upgrade = false;
    std::string note;

    bool stationary() const {
        return verdict == Verdict::PseudoBStationary || verdict == Verdict::LinearizedStationary;
    }
};

// B-stationarity of x for an explicit pulled-down problem.
StationarityCertificate certify_pulled_down(const PulledDownProblem& pd, const Vec& x,
                                            const Tolerances& tol = {});

// The fixed-point check: x against its own pulled-down problem. Throws if x
// is infeasible for the original problem.
StationarityCertificate check_pseudo_b_stationary(const ProblemSpec& p, const Vec& x,
                                                  const Tolerances& tol = {});

enum class MultiplierMode { Necessary, SufficientB, SufficientC };

struct MultiplierEntry {
    std::vector<int> xi, mu;
    Verdict verdict = Verdict::Inconclusive;
    double min_dd = 0.0;
};

struct MultiplierReport {
    MultiplierMode mode = MultiplierMode::Necessary;
    std::vector<MultiplierEntry> entries;
    bool aggregate_pass = false;   // exists-pass for Necessary, forall-pass otherwise
    bool precondition_ok = true;   // SufficientC: multiplier signs at the anchor
    std::string precondition_note;
};

// Binary relaxation families over the zero classes; each choice drops the
// matching zero-class constraints (and, in the SufficientC form, charges the
// multiplier functions to the objective and the functional row).
MultiplierReport enumerate_multiplier_family(const ProblemSpec& p, const Vec& x,
                                             MultiplierMode mode, const Tolerances& tol = {},
                                             int budget_bits = 12);

enum class SignMode { ZeroSet, Sublevel, Neighborhood };

struct SignRow {
    bool constraint_side = false;
    int term = 0;
    bool pass = false;
    bool exact = false;
    bool vacuous = false;
    double min_value = 0.0;
    std::string note;
};

struct SignConditionReport {
    SignMode mode = SignMode::ZeroSet;
    std::vector<SignRow> rows;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

// Multiplier nonnegativity on the zero set (mode ZeroSet), the sublevel set
// (mode Sublevel), or a ball around a point (mode Neighborhood). Exact via LP
// for affine data and constant multipliers; sampled with a heuristic flag
// otherwise.
SignConditionReport check_sign_conditions(const ProblemSpec& p, SignMode mode, Rng& rng,
                                          const Vec* center = nullptr, double radius = 0.1,
                                          int grid_res = 48);

struct C4SampleRow {
    Vec x;
    bool applicable = false; // functional value above budget at x
    double lp_value = 0.0;
    bool pass = false;
    Vec direction;
    double euclid_value = 0.0; // dd of the Euclidean-normalized direction
};

struct C4Report {
    std::vector<C4SampleRow> rows;
    int applicable = 0;
    int passed = 0;
    bool all_applicable_pass() const { return applicable == passed; }
};

// Descent-direction check at infeasible points: minimize the positive-class
// functional dd over the functional-free pulled-down cone; pass when the
// box-LP value reaches -1.
C4Report check_c4_sufficient(const ProblemSpec& p, const std::vector<Vec>& samples,
                             const Tolerances& tol = {});

// Structural comparison with the fixed-support restriction for pure weighted
// l0 objectives: zero coordinates must appear as the +-x_i <= 0 pair and all
// other term rows must be strictly inactive near the anchor.
bool reproduces_restricted_zero_problem(const ProblemSpec& p, const Vec& anchor,
                                        std::string* why = nullptr,
                                        const Tolerances& tol = {});

} // namespace hcopt

#endif
