#ifndef HCOPT_APPROX_HPP
#define HCOPT_APPROX_HPP

#include <functional>
#include <string>
#include <vector>

#include "hcopt/function_handle.hpp"

namespace hcopt {

// Clamp to [0,1]; equals max(t,0) - max(t-1,0).
double truncate01(double t);

enum class FamilyTag {
    TruncatedHinge,
    ModifiedHinge,
    TruncationOfPsi,
    SteklovCDF,
    AsymmetricSteklovCDF,
    L0Sum,
    Custom,
};

// A bivariate theta(t, delta) in [0,1] meant to approach the open step
// function as delta drops to zero, together with its support endpoints and
// exact one-sided derivatives in t. Values are clamped outside the support
// interval [-lower_end(delta), upper_end(delta)], so the support axiom (A2)
// holds exactly, not merely up to rounding.
struct ApproxFamily {
    FamilyTag tag = FamilyTag::Custom;
    std::string label;
    std::function<double(double, double)> theta;
    std::function<double(double)> lower_end; // theta_lower(delta) >= 0
    std::function<double(double)> upper_end; // theta_upper(delta) >= 0
    std::function<double(double, double)> dd_plus;  // d/dt from the right
    std::function<double(double, double)> dd_minus; // one-sided value against -t
    bool known_pointwise_defect = false; // fails (A1) at t = 0 by construction

    double value(double t, double delta) const { return theta(t, delta); }
    // Directional derivative theta(.,delta)'(t; s) for scalar direction s.
    double dd(double t, double delta, double s) const {
        if (s > 0) return s * dd_plus(t, delta);
        if (s < 0) return -s * dd_minus(t, delta);
        return 0.0;
    }
};

// T_h(t, delta) = (1/2delta) [max(t+delta,0) - max(t-delta,0)]; value 1/2 at
// t = 0 for every delta, so the pointwise limit at zero is 1/2, not 0.
ApproxFamily make_truncated_hinge();

// Truncation family theta(t,delta) = clamp(psi(q(delta) + t/m(delta))) for a
// nondecreasing 1-D handle psi with psi(0)=0, psi(1)=1 and vanishing q, m.
// Support endpoints are m*q and m*(1-q).
ApproxFamily make_truncation_family(const FunctionHandle& psi,
                                    std::function<double(double)> q,
                                    std::function<double(double)> m,
                                    std::string label = "truncation");

// The truncation family with psi = identity, q = sqrt(d)/(1+sqrt(d)),
// m = d + sqrt(d).
ApproxFamily make_modified_hinge();

// Piecewise-constant mollifier density on [knots_0, knots_last]; vals[i]
// applies on [knots[i], knots[i+1]).
struct PiecewiseConstDensity {
    std::vector<double> knots;
    std::vector<double> vals;
    double mass() const;
    double integral_from_left(double t) const; // integral over (-inf, t]
    double value_right_of(double t) const;     // density limit from the right
    double value_left_of(double t) const;      // density limit from the left
};

struct NonifierFamily {
    std::string label;
    std::function<PiecewiseConstDensity(double)> density; // per delta
    std::function<double(double)> lower_end, upper_end;   // support bounds
};

// CDF of a piecewise-constant nonifier, integrated in closed form. Errors if
// the density mass deviates from 1 by more than 1e-8 on the probe grid.
ApproxFamily make_nonifier_cdf(const NonifierFamily& family, FamilyTag tag,
                               bool known_defect);

struct SteklovSpec {
    bool symmetric = true;
    // Used only by the asymmetric kind.
    std::function<double(double)> lower_end;
    std::function<double(double)> upper_end;
};

// Symmetric kind: constant density 1/delta on [-delta/2, delta/2]; its CDF
// equals the truncated hinge at half width and inherits its defect at zero.
// Asymmetric kind: constant density on [-lower(delta), upper(delta)], valid
// when lower/upper vanish with lower/upper -> 0 ratio.
ApproxFamily make_steklov_cdf(const SteklovSpec& spec);

// rho(t, delta) = plus(t, delta) + minus(-t, delta); approximates the
// support-counting function |t|_0.
struct L0Family {
    std::string label;
    std::function<double(double, double)> rho;
    std::function<double(double)> lower_end, upper_end;
    std::function<double(double, double)> dd_plus, dd_minus;
};
L0Family make_l0_family(const ApproxFamily& plus, const ApproxFamily& minus);

struct AxiomCheck {
    std::string axiom;
    bool pass = false;
    std::string witness;
    double witness_value = 0.0; // e.g. the recorded pointwise limit on an (A1) failure
};

struct AxiomReport {
    std::string family;
    std::vector<AxiomCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const AxiomCheck* find(const std::string& axiom) const {
        for (const auto& c : checks)
            if (c.axiom == axiom) return &c;
        return nullptr;
    }
};

// Runs (A0) endpoint decay, (A1) pointwise limits on a fixed t probe set,
// (A2) exact support, (A3) one-sided derivative signs plus fd-oracle
// agreement. Failures are reported with witnesses, never thrown.
AxiomReport axiom_suite(const ApproxFamily& family);

// The adapted suite for |t|_0 approximations: pointwise limit to |t|_0 and a
// V-shaped monotonicity check replace (A1)/(A3).
AxiomReport l0_axiom_suite(const L0Family& family);

// Rows (t, delta, theta) for external plotting.
struct FamilyTable {
    std::vector<double> t, delta, theta;
};
FamilyTable tabulate_family(const ApproxFamily& family, const std::vector<double>& ts,
                            const std::vector<double>& deltas);

} // namespace hcopt

#endif
