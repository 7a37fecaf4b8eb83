#include "hcopt/approx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcopt {

namespace {

const std::vector<double>& delta_grid() {
    static const std::vector<double> g = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    return g;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// One-sided derivative of the clamp at value y against inner slope w.
double clamp_dd(double y, double w) {
    if (y < 0.0 || y > 1.0) return 0.0;
    if (y == 0.0) return std::max(w, 0.0);
    if (y == 1.0) return std::min(w, 0.0);
    return w;
}

double snap(double s, double target, double tol = 1e-12) {
    return std::fabs(s - target) <= tol ? target : s;
}

} // namespace

double truncate01(double t) { return std::min(std::max(t, 0.0), 1.0); }

ApproxFamily make_truncated_hinge() {
    ApproxFamily f;
    f.tag = FamilyTag::TruncatedHinge;
    f.label = "truncated-hinge";
    f.lower_end = [](double d) { return d; };
    f.upper_end = [](double d) { return d; };
    f.theta = [](double t, double d) {
        if (t <= -d) return 0.0;
        if (t >= d) return 1.0;
        return (std::max(t + d, 0.0) - std::max(t - d, 0.0)) / (2.0 * d);
    };
    f.dd_plus = [](double t, double d) { return (t >= -d && t < d) ? 1.0 / (2.0 * d) : 0.0; };
    f.dd_minus = [](double t, double d) { return (t > -d && t <= d) ? -1.0 / (2.0 * d) : 0.0; };
    f.known_pointwise_defect = true;
    return f;
}

ApproxFamily make_truncation_family(const FunctionHandle& psi,
                                    std::function<double(double)> q,
                                    std::function<double(double)> m, std::string label) {
    if (psi.dimension() != 1)
        throw std::invalid_argument("truncation family: psi must be univariate");
    if (!psi.has_structure())
        throw std::invalid_argument("truncation family: psi must be structured");
    if (std::fabs(psi.eval({0.0})) > 1e-12 || std::fabs(psi.eval({1.0}) - 1.0) > 1e-12)
        throw std::invalid_argument("truncation family: psi(0)=0 and psi(1)=1 required");
    for (double s = 0.0; s < 1.0; s += 0.05)
        if (psi.eval({s + 0.05}) < psi.eval({s}) - 1e-12)
            throw std::invalid_argument("truncation family: psi must be nondecreasing");
    for (double d : delta_grid()) {
        if (m(d) <= 0.0) throw std::invalid_argument("truncation family: m(delta) must be positive");
        if (q(d) < 0.0 || q(d) > 1.0)
            throw std::invalid_argument("truncation family: q(delta) must lie in [0,1]");
    }
    if (q(delta_grid().back()) > 1e-3 || m(delta_grid().back()) > 1e-3)
        throw std::invalid_argument("truncation family: q and m must vanish with delta");

    ApproxFamily f;
    f.tag = FamilyTag::TruncationOfPsi;
    f.label = std::move(label);
    f.lower_end = [q, m](double d) { return m(d) * q(d); };
    f.upper_end = [q, m](double d) { return m(d) * (1.0 - q(d)); };
    auto inner_arg = [q, m](double t, double d) {
        return snap(snap(q(d) + t / m(d), 0.0), 1.0);
    };
    f.theta = [psi, q, m, inner_arg, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t <= -lo(d)) return 0.0;
        if (t >= hi(d)) return 1.0;
        return truncate01(psi.eval({inner_arg(t, d)}));
    };
    f.dd_plus = [psi, m, inner_arg, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t < -lo(d) || t >= hi(d)) return 0.0;
        double s = snap(snap(inner_arg(t, d), 0.0), 1.0);
        double y = snap(snap(psi.eval({s}), 0.0), 1.0);
        return clamp_dd(y, psi.dir_deriv({s}, {1.0}) / m(d));
    };
    f.dd_minus = [psi, m, inner_arg, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t <= -lo(d) || t > hi(d)) return 0.0;
        double s = snap(snap(inner_arg(t, d), 0.0), 1.0);
        double y = snap(snap(psi.eval({s}), 0.0), 1.0);
        return clamp_dd(y, psi.dir_deriv({s}, {-1.0}) / m(d));
    };
    return f;
}

ApproxFamily make_modified_hinge() {
    FunctionHandle identity = FunctionHandle::affine({1.0}, 0.0, "t");
    identity.monotone_nondecreasing = true;
    ApproxFamily f = make_truncation_family(
        identity, [](double d) { return std::sqrt(d) / (1.0 + std::sqrt(d)); },
        [](double d) { return d + std::sqrt(d); }, "modified-hinge");
    f.tag = FamilyTag::ModifiedHinge;
    return f;
}

double PiecewiseConstDensity::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) s += vals[i] * (knots[i + 1] - knots[i]);
    return s;
}

double PiecewiseConstDensity::integral_from_left(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (t <= knots[i]) break;
        double upper = std::min(t, knots[i + 1]);
        s += vals[i] * (upper - knots[i]);
    }
    return s;
}

double PiecewiseConstDensity::value_right_of(double t) const {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (t >= knots[i] && t < knots[i + 1]) return vals[i];
    return 0.0;
}

double PiecewiseConstDensity::value_left_of(double t) const {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (t > knots[i] && t <= knots[i + 1]) return vals[i];
    return 0.0;
}

ApproxFamily make_nonifier_cdf(const NonifierFamily& family, FamilyTag tag,
                               bool known_defect) {
    for (double d : delta_grid()) {
        PiecewiseConstDensity rho = family.density(d);
        if (rho.knots.size() < 2 || rho.vals.size() + 1 != rho.knots.size())
            throw std::invalid_argument("nonifier: malformed density for " + family.label);
        if (std::fabs(rho.mass() - 1.0) > 1e-8)
            throw std::invalid_argument("nonifier: density of '" + family.label +
                                        "' is not normalized at delta=" + fmt(d));
        for (double v : rho.vals)
            if (v < 0.0) throw std::invalid_argument("nonifier: negative density");
        if (rho.knots.front() < -family.lower_end(d) - 1e-12 ||
            rho.knots.back() > family.upper_end(d) + 1e-12)
            throw std::invalid_argument("nonifier: support escapes the declared bounds");
    }
    ApproxFamily f;
    f.tag = tag;
    f.label = family.label;
    f.lower_end = family.lower_end;
    f.upper_end = family.upper_end;
    f.known_pointwise_defect = known_defect;
    auto density = family.density;
    f.theta = [density, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t <= -lo(d)) return 0.0;
        if (t >= hi(d)) return 1.0;
        return truncate01(density(d).integral_from_left(t));
    };
    f.dd_plus = [density, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t < -lo(d) || t >= hi(d)) return 0.0;
        return density(d).value_right_of(t);
    };
    f.dd_minus = [density, lo = f.lower_end, hi = f.upper_end](double t, double d) {
        if (t <= -lo(d) || t > hi(d)) return 0.0;
        return -density(d).value_left_of(t);
    };
    return f;
}

ApproxFamily make_steklov_cdf(const SteklovSpec& spec) {
    NonifierFamily nf;
    if (spec.symmetric) {
        nf.label = "steklov-symmetric";
        nf.lower_end = [](double d) { return d / 2.0; };
        nf.upper_end = [](double d) { return d / 2.0; };
        nf.density = [](double d) {
            PiecewiseConstDensity rho;
            rho.knots = {-d / 2.0, d / 2.0};
            rho.vals = {1.0 / d};
            return rho;
        };
        return make_nonifier_cdf(nf, FamilyTag::SteklovCDF, /*known_defect=*/true);
    }
    if (!spec.lower_end || !spec.upper_end)
        throw std::invalid_argument("steklov: asymmetric kind needs endpoint functions");
    auto lo = spec.lower_end;
    auto hi = spec.upper_end;
    // Ratio must vanish and the width-sup product must stay bounded.
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double d : delta_grid()) {
        if (lo(d) <= 0.0 || hi(d) <= 0.0)
            throw std::invalid_argument("steklov: endpoints must be positive");
        double ratio = lo(d) / hi(d);
        if (ratio > prev_ratio + 1e-12)
            throw std::invalid_argument("steklov: lower/upper ratio must decay");
        prev_ratio = ratio;
        double width = lo(d) + hi(d);
        double sup = 1.0 / width;
        if (width * sup > 100.0)
            throw std::invalid_argument("steklov: width-sup product unbounded");
    }
    if (prev_ratio > 1e-3)
        throw std::invalid_argument("steklov: lower/upper ratio does not vanish");
    nf.label = "steklov-asymmetric";
    nf.lower_end = lo;
    nf.upper_end = hi;
    nf.density = [lo, hi](double d) {
        PiecewiseConstDensity rho;
        rho.knots = {-lo(d), hi(d)};
        rho.vals = {1.0 / (lo(d) + hi(d))};
        return rho;
    };
    return make_nonifier_cdf(nf, FamilyTag::AsymmetricSteklovCDF, /*known_defect=*/false);
}

L0Family make_l0_family(const ApproxFamily& plus, const ApproxFamily& minus) {
    AxiomReport rp = axiom_suite(plus);
    AxiomReport rm = axiom_suite(minus);
    if (!rp.all_pass() || !rm.all_pass())
        throw std::invalid_argument("l0 family: both halves must pass the axiom suite");
    L0Family f;
    f.label = "l0(" + plus.label + "," + minus.label + ")";
    f.rho = [p = plus, m = minus](double t, double d) {
        return p.theta(t, d) + m.theta(-t, d);
    };
    f.lower_end = [p = plus, m = minus](double d) {
        return std::max(p.lower_end(d), m.upper_end(d));
    };
    f.upper_end = [p = plus, m = minus](double d) {
        return std::max(p.upper_end(d), m.lower_end(d));
    };
    f.dd_plus = [p = plus, m = minus](double t, double d) {
        return p.dd_plus(t, d) + m.dd_minus(-t, d);
    };
    f.dd_minus = [p = plus, m = minus](double t, double d) {
        return p.dd_minus(t, d) + m.dd_plus(-t, d);
    };
    return f;
}

namespace {

AxiomCheck check_endpoint_decay(const ApproxFamily& f) {
    AxiomCheck c{"A0", true, ""};
    double prev_lo = std::numeric_limits<double>::infinity();
    double prev_hi = prev_lo;
    for (double d : delta_grid()) {
        double lo = f.lower_end(d), hi = f.upper_end(d);
        if (lo < -1e-15 || hi < -1e-15) {
            c.pass = false;
            c.witness = "negative endpoint at delta=" + fmt(d);
            return c;
        }
        if (lo > prev_lo + 1e-12 || hi > prev_hi + 1e-12) {
            c.pass = false;
            c.witness = "no decay trend at delta=" + fmt(d);
            return c;
        }
        prev_lo = lo;
        prev_hi = hi;
    }
    if (prev_lo > 1e-3 || prev_hi > 1e-3) {
        c.pass = false;
        c.witness = "endpoints stall at " + fmt(prev_lo) + "/" + fmt(prev_hi);
    }
    return c;
}

} // namespace

AxiomReport axiom_suite(const ApproxFamily& f) {
    AxiomReport report;
    report.family = f.label;
    report.checks.push_back(check_endpoint_decay(f));

    { // (A1) pointwise limit at the probe set
        AxiomCheck c{"A1", true, ""};
        const double t_probe[] = {-1.0, -0.1, -0.001, 0.0, 0.001, 0.1, 1.0};
        for (double t : t_probe) {
            double target = t > 0.0 ? 1.0 : 0.0;
            std::vector<double> errs;
            double last = 0.0;
            for (double d : delta_grid()) {
                last = f.theta(t, d);
                errs.push_back(std::fabs(last - target));
            }
            // The error may rise while the support still straddles t; the
            // trend assertion applies to the grid tail.
            bool trend = true;
            for (std::size_t i = errs.size() - 3; i + 1 < errs.size(); ++i)
                if (errs[i + 1] > errs[i] + 1e-12) trend = false;
            if (!trend || std::fabs(last - target) > 1e-3) {
                c.pass = false;
                c.witness = "t=" + fmt(t) + " limit=" + fmt(last);
                c.witness_value = last;
                break;
            }
        }
        report.checks.push_back(c);
    }

    { // (A2) exact support values
        AxiomCheck c{"A2", true, ""};
        for (double d : delta_grid()) {
            double lo = f.lower_end(d), hi = f.upper_end(d);
            double below[] = {-lo, -lo - 0.5 * (lo + 1e-3), -lo - 1.0};
            double above[] = {hi, hi + 0.5 * (hi + 1e-3), hi + 1.0};
            for (double t : below) {
                if (f.theta(t, d) != 0.0) {
                    c.pass = false;
                    c.witness = "theta(" + fmt(t) + "," + fmt(d) + ") != 0";
                }
            }
            for (double t : above) {
                if (f.theta(t, d) != 1.0) {
                    c.pass = false;
                    c.witness = "theta(" + fmt(t) + "," + fmt(d) + ") != 1";
                }
            }
            if (!c.pass) break;
        }
        report.checks.push_back(c);
    }

    { // (A3) one-sided derivative signs plus fd agreement on the support
        AxiomCheck c{"A3", true, ""};
        for (double d : {1e-1, 1e-3, 1e-5}) {
            double lo = f.lower_end(d), hi = f.upper_end(d);
            double width = lo + hi;
            if (width <= 0.0) continue;
            for (int i = 0; i <= 24 && c.pass; ++i) {
                // endpoints sampled exactly; rounding must not push t off the support
                double t = i == 0 ? -lo : (i == 24 ? hi : -lo + width * i / 24.0);
                double dp = f.dd_plus(t, d);
                double dm = f.dd_minus(t, d);
                if (dp < -1e-12 || dm > 1e-12) {
                    c.pass = false;
                    c.witness = "sign violation at t=" + fmt(t) + ", delta=" + fmt(d);
                    break;
                }
                std::vector<double> steps;
                for (int j = 0; j < 12; ++j) steps.push_back(width * 0.05 * std::pow(0.25, j));
                auto theta_t = [&](const Vec& z) { return f.theta(z[0], d); };
                double fdp = fd_dir_derivative_oracle(theta_t, {t}, {1.0}, steps);
                double fdm = fd_dir_derivative_oracle(theta_t, {t}, {-1.0}, steps);
                double scale = std::max(1.0, std::fabs(dp) + std::fabs(dm));
                if (std::fabs(fdp - dp) > 1e-5 * scale || std::fabs(fdm - dm) > 1e-5 * scale) {
                    c.pass = false;
                    c.witness = "fd mismatch at t=" + fmt(t) + ", delta=" + fmt(d);
                }
            }
            if (!c.pass) break;
        }
        report.checks.push_back(c);
    }
    return report;
}

AxiomReport l0_axiom_suite(const L0Family& f) {
    AxiomReport report;
    report.family = f.label;
    { // (A0)
        ApproxFamily shim;
        shim.label = f.label;
        shim.lower_end = f.lower_end;
        shim.upper_end = f.upper_end;
        report.checks.push_back(check_endpoint_decay(shim));
    }
    { // (A1): pointwise limit equals the support indicator |t|_0
        AxiomCheck c{"A1", true, ""};
        const double t_probe[] = {-1.0, -0.1, -0.001, 0.0, 0.001, 0.1, 1.0};
        for (double t : t_probe) {
            double target = t != 0.0 ? 1.0 : 0.0;
            double last = 0.0;
            for (double d : delta_grid()) last = f.rho(t, d);
            if (std::fabs(last - target) > 1e-3) {
                c.pass = false;
                c.witness = "t=" + fmt(t) + " limit=" + fmt(last);
                break;
            }
        }
        report.checks.push_back(c);
    }
    { // (A2): exact value 1 outside the support window
        AxiomCheck c{"A2", true, ""};
        for (double d : delta_grid()) {
            double lo = f.lower_end(d), hi = f.upper_end(d);
            if (f.rho(hi, d) != 1.0 || f.rho(hi + 1.0, d) != 1.0 || f.rho(-lo, d) != 1.0 ||
                f.rho(-lo - 1.0, d) != 1.0) {
                c.pass = false;
                c.witness = "delta=" + fmt(d);
                break;
            }
        }
        report.checks.push_back(c);
    }
    { // (A3): V profile, one-sided slopes point away from the origin
        AxiomCheck c{"A3", true, ""};
        for (double d : {1e-1, 1e-3, 1e-5}) {
            double hi = f.upper_end(d), lo = f.lower_end(d);
            for (int i = 0; i <= 16; ++i) {
                double tp = hi * i / 16.0;
                double tm = -lo * i / 16.0;
                if (f.dd_plus(tp, d) < -1e-12 || f.dd_minus(tm, d) < -1e-12) {
                    c.pass = false;
                    c.witness = "slope sign at delta=" + fmt(d);
                    break;
                }
            }
            if (!c.pass) break;
        }
        report.checks.push_back(c);
    }
    return report;
}

FamilyTable tabulate_family(const ApproxFamily& f, const std::vector<double>& ts,
                            const std::vector<double>& deltas) {
    FamilyTable tab;
    for (double d : deltas) {
        for (double t : ts) {
            tab.t.push_back(t);
            tab.delta.push_back(d);
            tab.theta.push_back(f.theta(t, d));
        }
    }
    return tab;
}

} // namespace hcopt
