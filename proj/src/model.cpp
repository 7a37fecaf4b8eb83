#include "hcopt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hcopt {

double ProblemSpec::objective_value(const Vec& x) const {
    double s = base_cost.eval(x);
    for (const auto& t : objective_terms) s += t.value(x);
    return s;
}

double ProblemSpec::functional_value(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : constraint_terms) s += t.value(x);
    return s;
}

bool ProblemSpec::feasible(const Vec& x, double tol) const {
    if (!feasible_set.contains(x, tol)) return false;
    if (!has_functional_constraint()) return true;
    return functional_value(x) <= budget + tol;
}

void ProblemSpec::validate() const {
    const int n = dimension();
    if (base_cost.dimension() != n)
        throw std::invalid_argument("problem: base cost dimension mismatch");
    for (const auto& t : objective_terms)
        if (t.multiplier.dimension() != n || t.inner.dimension() != n)
            throw std::invalid_argument("problem: objective term dimension mismatch");
    for (const auto& t : constraint_terms)
        if (t.multiplier.dimension() != n || t.inner.dimension() != n)
            throw std::invalid_argument("problem: constraint term dimension mismatch");
}

RewriteResult rewrite_closed(const HeavisideTerm& term) {
    if (term.flavor != Flavor::Closed)
        throw std::invalid_argument("rewrite_closed: term is already open");
    RewriteResult r;
    r.constant_part = term.multiplier;
    r.open_term.multiplier = term.multiplier;
    r.open_term.inner = FunctionHandle::scale(term.inner, -1.0);
    r.open_term.flavor = Flavor::Open;
    r.open_term_sign = -1.0;
    return r;
}

ProblemSpec canonicalize(const ProblemSpec& p) {
    ProblemSpec q = p;
    q.objective_terms.clear();
    q.constraint_terms.clear();
    std::vector<FunctionHandle> cost_parts = {p.base_cost};

    for (const auto& t : p.objective_terms) {
        if (t.flavor == Flavor::Open) {
            q.objective_terms.push_back(t);
            continue;
        }
        RewriteResult r = rewrite_closed(t);
        cost_parts.push_back(r.constant_part);
        HeavisideTerm open = r.open_term;
        open.multiplier = FunctionHandle::scale(open.multiplier, r.open_term_sign);
        q.objective_terms.push_back(std::move(open));
    }
    for (const auto& t : p.constraint_terms) {
        if (t.flavor == Flavor::Open) {
            q.constraint_terms.push_back(t);
            continue;
        }
        RewriteResult r = rewrite_closed(t);
        // Constraint-side constants stay inside the sum as an always-on term.
        HeavisideTerm always;
        always.multiplier = r.constant_part;
        always.inner = FunctionHandle::constant(p.dimension(), 1.0, "1");
        always.flavor = Flavor::Open;
        q.constraint_terms.push_back(std::move(always));
        HeavisideTerm open = r.open_term;
        open.multiplier = FunctionHandle::scale(open.multiplier, r.open_term_sign);
        q.constraint_terms.push_back(std::move(open));
    }
    q.base_cost = FunctionHandle::sum(cost_parts);
    return q;
}

bool is_canonical(const ProblemSpec& p) {
    for (const auto& t : p.objective_terms)
        if (t.flavor != Flavor::Open) return false;
    for (const auto& t : p.constraint_terms)
        if (t.flavor != Flavor::Open) return false;
    return true;
}

std::vector<HeavisideTerm> build_l0(const Vec& weights, TermRole, int dim) {
    const int n = dim < 0 ? static_cast<int>(weights.size()) : dim;
    if (static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("build_l0: weights length must equal the dimension");
    std::vector<HeavisideTerm> terms;
    for (int i = 0; i < n; ++i) {
        double w = weights[i];
        if (w < 0.0) throw std::invalid_argument("build_l0: weights must be nonnegative");
        if (w == 0.0) continue;
        Vec e(n, 0.0);
        e[i] = 1.0;
        std::string xi = "x" + std::to_string(i + 1);
        HeavisideTerm plus;
        plus.multiplier = FunctionHandle::constant(n, w);
        plus.inner = FunctionHandle::affine(e, 0.0, xi);
        plus.flavor = Flavor::Open;
        terms.push_back(std::move(plus));
        HeavisideTerm minus;
        minus.multiplier = FunctionHandle::constant(n, w);
        minus.inner = FunctionHandle::affine(scaled(e, -1.0), 0.0, "-" + xi);
        minus.flavor = Flavor::Open;
        terms.push_back(std::move(minus));
    }
    return terms;
}

PiecewiseRegionResult build_piecewise_region(const FunctionHandle& psi1,
                                             const FunctionHandle& psi2,
                                             const FunctionHandle& psi3,
                                             const FunctionHandle& f, double a, double b,
                                             PiecewiseBoundary boundary) {
    if (!(a < b)) throw std::invalid_argument("build_piecewise_region: requires a < b");
    const bool lo_finite = std::isfinite(a);
    const bool hi_finite = std::isfinite(b);
    const int n = f.dimension();
    auto shifted = [&](double c, double sgn) {
        // sgn * f - sgn * c as a handle; builds a - f and f - b style inners.
        FunctionHandle s = FunctionHandle::scale(f, sgn);
        return FunctionHandle::sum({s, FunctionHandle::constant(n, -sgn * c)});
    };

    PiecewiseRegionResult out;
    if (boundary == PiecewiseBoundary::ClosedMiddle) {
        // psi1 - psi1*step(max(f-b, a-f)) + psi2*step(a-f) + psi3*step(f-b)
        out.additive = psi1;
        if (lo_finite || hi_finite) {
            HeavisideTerm leave_mid;
            leave_mid.multiplier = FunctionHandle::scale(psi1, -1.0);
            if (lo_finite && hi_finite)
                leave_mid.inner = FunctionHandle::max_of({shifted(b, 1.0), shifted(a, -1.0)});
            else if (hi_finite)
                leave_mid.inner = shifted(b, 1.0);
            else
                leave_mid.inner = shifted(a, -1.0);
            leave_mid.flavor = Flavor::Open;
            out.terms.push_back(std::move(leave_mid));
        }
        if (lo_finite) {
            HeavisideTerm below;
            below.multiplier = psi2;
            below.inner = shifted(a, -1.0); // a - f
            below.flavor = Flavor::Open;
            out.terms.push_back(std::move(below));
        }
        if (hi_finite) {
            HeavisideTerm above;
            above.multiplier = psi3;
            above.inner = shifted(b, 1.0); // f - b
            above.flavor = Flavor::Open;
            out.terms.push_back(std::move(above));
        }
        return out;
    }

    // ClosedRight: psi3 + (psi1-psi3)*step(b-f) + (psi2-psi1)*step(a-f)
    if (!hi_finite) {
        out.additive = psi1;
        if (lo_finite) {
            HeavisideTerm below;
            below.multiplier = FunctionHandle::difference(psi2, psi1);
            below.inner = shifted(a, -1.0);
            below.flavor = Flavor::Open;
            out.terms.push_back(std::move(below));
        }
        return out;
    }
    out.additive = psi3;
    {
        HeavisideTerm mid;
        mid.multiplier = FunctionHandle::difference(psi1, psi3);
        mid.inner = shifted(b, -1.0); // b - f
        mid.flavor = Flavor::Open;
        out.terms.push_back(std::move(mid));
    }
    if (lo_finite) {
        HeavisideTerm below;
        below.multiplier = FunctionHandle::difference(psi2, psi1);
        below.inner = shifted(a, -1.0); // a - f
        below.flavor = Flavor::Open;
        out.terms.push_back(std::move(below));
    }
    return out;
}

std::vector<HeavisideTerm> build_indicator_product(
    const FunctionHandle& f, const FunctionHandle& g, IndicatorPair pair,
    std::optional<FunctionHandle> multiplier) {
    if (f.dimension() != g.dimension())
        throw std::invalid_argument("build_indicator_product: dimension mismatch");
    const int n = f.dimension();
    FunctionHandle mult =
        multiplier ? *multiplier : FunctionHandle::constant(n, 1.0, "1");

    std::vector<HeavisideTerm> terms;
    if (pair == IndicatorPair::ClosedClosed) {
        HeavisideTerm t;
        t.multiplier = mult;
        t.inner = FunctionHandle::min_of({f, g});
        t.flavor = Flavor::Closed;
        terms.push_back(std::move(t));
        return terms;
    }
    // step_closed(f)*step_open(g) = step(g) - step(min(-f, g))
    HeavisideTerm pos;
    pos.multiplier = mult;
    pos.inner = g;
    pos.flavor = Flavor::Open;
    terms.push_back(std::move(pos));
    HeavisideTerm neg;
    neg.multiplier = FunctionHandle::scale(mult, -1.0);
    neg.inner = FunctionHandle::min_of({FunctionHandle::scale(f, -1.0), g});
    neg.flavor = Flavor::Open;
    terms.push_back(std::move(neg));
    return terms;
}

HeavisideTerm build_onoff(const FunctionHandle& f) {
    if (f.structure() != FuncStructure::Smooth)
        throw std::invalid_argument("build_onoff: gate requires a smooth constraint function");
    const int n = f.dimension();
    FunctionHandle fx = FunctionHandle::lift_dimension(f);
    FunctionHandle y = FunctionHandle::affine(unit(n + 1, n), 0.0, "y");
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(n + 1, 1.0, "1");
    t.inner = FunctionHandle::smooth_product(y, fx);
    t.inner.label = "y*(" + f.label + ")";
    t.flavor = Flavor::Closed;
    return t;
}

HeavisideTerm build_sign_classification(const FunctionHandle& f, double sigma,
                                        double margin) {
    if (sigma != 1.0 && sigma != -1.0)
        throw std::invalid_argument("build_sign_classification: sigma must be +-1");
    const int n = f.dimension();
    HeavisideTerm t;
    t.multiplier = FunctionHandle::constant(n, 1.0, "1");
    t.inner = FunctionHandle::sum(
        {FunctionHandle::scale(f, -sigma), FunctionHandle::constant(n, margin)});
    t.inner.label = (margin != 0.0 ? std::to_string(margin) : std::string("0")) +
                    (sigma > 0 ? "-" : "+") + f.label;
    t.flavor = Flavor::Open;
    return t;
}

} // namespace hcopt
