#ifndef HCOPT_MODEL_HPP
#define HCOPT_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "hcopt/function_handle.hpp"
#include "hcopt/polyhedron.hpp"
#include "hcopt/rng.hpp"

namespace hcopt {

enum class Flavor { Open, Closed };

// One product multiplier(x) * step(inner(x)), the building block of both the
// objective tail and the functional constraint. Open flavor uses the
// indicator of (0, inf), closed flavor of [0, inf). Canonical problems carry
// open terms only; rewriting may leave signed multipliers behind.
struct HeavisideTerm {
    FunctionHandle multiplier;
    FunctionHandle inner;
    Flavor flavor = Flavor::Open;

    double value(const Vec& x) const {
        double g = inner.eval(x);
        bool on = flavor == Flavor::Open ? g > 0.0 : g >= 0.0;
        return on ? multiplier.eval(x) : 0.0;
    }
    int dimension() const { return multiplier.dimension(); }
};

struct ProblemSpec {
    FunctionHandle base_cost;                  // c
    std::vector<HeavisideTerm> objective_terms;  // K entries
    std::vector<HeavisideTerm> constraint_terms; // L entries
    double budget = 0.0;                       // b
    PolyhedralSet feasible_set;                // X

    int dimension() const { return feasible_set.n; }
    int K() const { return static_cast<int>(objective_terms.size()); }
    int L() const { return static_cast<int>(constraint_terms.size()); }
    bool has_functional_constraint() const { return L() > 0; }

    double objective_value(const Vec& x) const;   // c(x) + sum of objective products
    double functional_value(const Vec& x) const;  // sum of constraint products
    bool feasible(const Vec& x, double tol = 1e-9) const;

    void validate() const; // dimension consistency across handles and set
};

// psi * step_closed(f) = psi - psi * step_open(-f); the returned open term
// enters the sum with the recorded sign (always -1).
struct RewriteResult {
    FunctionHandle constant_part; // psi, added as-is
    HeavisideTerm open_term;      // multiplier psi, inner -f
    double open_term_sign = -1.0;
};
RewriteResult rewrite_closed(const HeavisideTerm& term);

// Open-only canonical form: closed objective terms fold their constant part
// into the base cost; closed constraint terms keep it as an always-on open
// term (inner identically 1) so the functional constraint stays a plain sum
// of Heaviside products.
ProblemSpec canonicalize(const ProblemSpec& p);
bool is_canonical(const ProblemSpec& p);

enum class TermRole { Objective, Constraint };

// Weighted l0 terms: per coordinate with weight c_i > 0, the two open terms
// c_i*step(x_i) and c_i*step(-x_i). Rejects negative weights.
std::vector<HeavisideTerm> build_l0(const Vec& weights, TermRole role, int dim = -1);

enum class PiecewiseBoundary { ClosedMiddle, ClosedRight };

struct PiecewiseRegionResult {
    FunctionHandle additive;          // part of the value without indicators
    std::vector<HeavisideTerm> terms; // open terms completing the expansion
    double value(const Vec& x) const {
        double s = additive.eval(x);
        for (const auto& t : terms) s += t.value(x);
        return s;
    }
};

// Three-piece function with value psi1 on the middle band of f, psi2 below a,
// psi3 above b. ClosedMiddle realizes psi1 on a <= f <= b; ClosedRight
// realizes psi1 on a <= f < b and psi3 on f >= b. Infinite endpoints drop the
// corresponding region.
PiecewiseRegionResult build_piecewise_region(const FunctionHandle& psi1,
                                             const FunctionHandle& psi2,
                                             const FunctionHandle& psi3,
                                             const FunctionHandle& f, double a, double b,
                                             PiecewiseBoundary boundary);

enum class IndicatorPair { ClosedClosed, ClosedOpen };

// Product of two unit indicators step(f)*step(g); ClosedClosed collapses to a
// single closed term with inner min(f, g), ClosedOpen expands to the
// difference of two open terms. An optional multiplier scales every term.
std::vector<HeavisideTerm> build_indicator_product(
    const FunctionHandle& f, const FunctionHandle& g, IndicatorPair pair,
    std::optional<FunctionHandle> multiplier = std::nullopt);

// On-off constraint f(x) >= 0 gated by the appended coordinate y in [0,1]:
// the closed term step_closed(y * f(x)) over (x, y). f must be smooth.
HeavisideTerm build_onoff(const FunctionHandle& f);

// Misclassification indicator step_open(margin - sigma * f(x)), sigma = +-1.
HeavisideTerm build_sign_classification(const FunctionHandle& f, double sigma,
                                        double margin = 0.0);

} // namespace hcopt

#endif
