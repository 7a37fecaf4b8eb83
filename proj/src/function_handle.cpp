#include "hcopt/function_handle.hpp"

#include <cmath>
#include <stdexcept>

#include "hcopt/polyhedron.hpp"

namespace hcopt {

namespace {

SmoothPiece constant_piece(int dim, double c) {
    SmoothPiece p;
    p.value = [c](const Vec&) { return c; };
    p.gradient = [dim](const Vec&) { return Vec(dim, 0.0); };
    p.affine = true;
    return p;
}

SmoothPiece sum_pieces(const SmoothPiece& a, const SmoothPiece& b) {
    SmoothPiece p;
    p.value = [a, b](const Vec& x) { return a.value(x) + b.value(x); };
    p.gradient = [a, b](const Vec& x) { return vsum(a.gradient(x), b.gradient(x)); };
    p.affine = a.affine && b.affine;
    return p;
}

SmoothPiece scale_piece(const SmoothPiece& a, double alpha) {
    SmoothPiece p;
    p.value = [a, alpha](const Vec& x) { return alpha * a.value(x); };
    p.gradient = [a, alpha](const Vec& x) { return scaled(a.gradient(x), alpha); };
    p.affine = a.affine;
    return p;
}

std::vector<SmoothPiece> cross_sum(const std::vector<SmoothPiece>& as,
                                   const std::vector<SmoothPiece>& bs) {
    if (as.empty()) return bs;
    if (bs.empty()) return as;
    std::vector<SmoothPiece> out;
    out.reserve(as.size() * bs.size());
    for (const auto& a : as)
        for (const auto& b : bs) out.push_back(sum_pieces(a, b));
    if (out.size() > 256)
        throw std::runtime_error("function handle: piece blow-up past desk scale");
    return out;
}

} // namespace

FunctionHandle FunctionHandle::constant(int dim, double c, std::string label) {
    FunctionHandle f;
    f.dim_ = dim;
    f.convex_.push_back(constant_piece(dim, c));
    f.declared_convex = true;
    f.lipschitz_hint = 0.0;
    f.label = label.empty() ? std::to_string(c) : std::move(label);
    return f;
}

FunctionHandle FunctionHandle::affine(Vec a, double d, std::string label) {
    FunctionHandle f;
    f.dim_ = static_cast<int>(a.size());
    SmoothPiece p;
    Vec acopy = a;
    p.value = [acopy, d](const Vec& x) { return dot(acopy, x) + d; };
    p.gradient = [acopy](const Vec&) { return acopy; };
    p.affine = true;
    f.convex_.push_back(std::move(p));
    f.declared_convex = true;
    f.lipschitz_hint = norm2(a);
    f.label = std::move(label);
    return f;
}

FunctionHandle FunctionHandle::smooth(int dim, std::function<double(const Vec&)> fv,
                                      std::function<Vec(const Vec&)> grad,
                                      std::string label) {
    FunctionHandle f;
    f.dim_ = dim;
    SmoothPiece p;
    p.value = std::move(fv);
    p.gradient = std::move(grad);
    f.convex_.push_back(std::move(p));
    f.label = std::move(label);
    return f;
}

FunctionHandle FunctionHandle::blackbox(int dim, std::function<double(const Vec&)> fv,
                                        std::string label) {
    FunctionHandle f;
    f.dim_ = dim;
    f.opaque_ = std::move(fv);
    f.label = std::move(label);
    return f;
}

FunctionHandle FunctionHandle::max_of(const std::vector<FunctionHandle>& fs) {
    if (fs.empty()) throw std::invalid_argument("max_of: empty list");
    FunctionHandle acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) {
        const FunctionHandle& g = fs[i];
        if (g.dim_ != acc.dim_) throw std::invalid_argument("max_of: dimension mismatch");
        if (!acc.has_structure() || !g.has_structure())
            throw std::invalid_argument("max_of: requires structured handles");
        // max(A - B, C - D) = max(A + D, C + B) - (B + D) with A,B,C,D maxes.
        FunctionHandle r;
        r.dim_ = acc.dim_;
        r.convex_ = cross_sum(acc.convex_, g.concave_);
        for (const auto& p : cross_sum(g.convex_, acc.concave_)) r.convex_.push_back(p);
        r.concave_ = cross_sum(acc.concave_, g.concave_);
        if (r.convex_.size() > 256)
            throw std::runtime_error("max_of: piece blow-up past desk scale");
        acc = std::move(r);
    }
    bool all_convex = true;
    std::string lbl = "max(";
    for (std::size_t i = 0; i < fs.size(); ++i) {
        lbl += (i ? "," : "") + fs[i].label;
        all_convex = all_convex && fs[i].declared_convex;
    }
    acc.declared_convex = all_convex || acc.convex_structured();
    acc.label = lbl + ")";
    return acc;
}

FunctionHandle FunctionHandle::scale(const FunctionHandle& f, double alpha) {
    if (!f.has_structure()) {
        FunctionHandle r = blackbox(f.dim_, [g = f.opaque_, alpha](const Vec& x) {
            return alpha * g(x);
        });
        r.label = f.label;
        return r;
    }
    FunctionHandle r;
    r.dim_ = f.dim_;
    if (alpha >= 0) {
        for (const auto& p : f.convex_) r.convex_.push_back(scale_piece(p, alpha));
        for (const auto& p : f.concave_) r.concave_.push_back(scale_piece(p, alpha));
    } else {
        // alpha (A - B) = (-alpha) B - (-alpha) A
        for (const auto& p : f.concave_) r.convex_.push_back(scale_piece(p, -alpha));
        if (r.convex_.empty()) r.convex_.push_back(constant_piece(f.dim_, 0.0));
        for (const auto& p : f.convex_) r.concave_.push_back(scale_piece(p, -alpha));
    }
    if (f.lipschitz_hint) r.lipschitz_hint = std::fabs(alpha) * *f.lipschitz_hint;
    r.label = (alpha == -1.0 ? "-" : std::to_string(alpha) + "*") + f.label;
    r.declared_convex = (alpha >= 0 && f.declared_convex) || r.convex_structured();
    return r;
}

FunctionHandle FunctionHandle::min_of(const std::vector<FunctionHandle>& fs) {
    std::vector<FunctionHandle> neg;
    neg.reserve(fs.size());
    for (const auto& f : fs) neg.push_back(scale(f, -1.0));
    FunctionHandle r = scale(max_of(neg), -1.0);
    std::string lbl = "min(";
    for (std::size_t i = 0; i < fs.size(); ++i) lbl += (i ? "," : "") + fs[i].label;
    r.label = lbl + ")";
    return r;
}

FunctionHandle FunctionHandle::abs_of(const FunctionHandle& f) {
    FunctionHandle r = max_of({f, scale(f, -1.0)});
    r.label = "abs(" + f.label + ")";
    return r;
}

FunctionHandle FunctionHandle::sum(const std::vector<FunctionHandle>& fs) {
    if (fs.empty()) throw std::invalid_argument("sum: empty list");
    FunctionHandle r;
    r.dim_ = fs[0].dim_;
    double hint = 0.0;
    bool have_hint = true;
    for (const auto& f : fs) {
        if (f.dim_ != r.dim_) throw std::invalid_argument("sum: dimension mismatch");
        if (!f.has_structure()) throw std::invalid_argument("sum: requires structured handles");
        r.convex_ = cross_sum(r.convex_, f.convex_);
        r.concave_ = cross_sum(r.concave_, f.concave_);
        if (f.lipschitz_hint) hint += *f.lipschitz_hint; else have_hint = false;
    }
    if (r.convex_.empty()) r.convex_.push_back(constant_piece(r.dim_, 0.0));
    if (have_hint) r.lipschitz_hint = hint;
    std::string lbl;
    bool all_convex = true;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        lbl += (i ? "+" : "") + fs[i].label;
        all_convex = all_convex && fs[i].declared_convex;
    }
    r.label = lbl;
    r.declared_convex = all_convex || r.convex_structured();
    return r;
}

FunctionHandle FunctionHandle::difference(const FunctionHandle& a, const FunctionHandle& b) {
    return sum({a, scale(b, -1.0)});
}

FunctionHandle FunctionHandle::smooth_product(const FunctionHandle& a, const FunctionHandle& b) {
    if (a.structure() != FuncStructure::Smooth || b.structure() != FuncStructure::Smooth)
        throw std::invalid_argument("smooth_product: both factors must be smooth");
    if (a.dim_ != b.dim_) throw std::invalid_argument("smooth_product: dimension mismatch");
    const SmoothPiece pa = a.convex_[0];
    const SmoothPiece pb = b.convex_[0];
    FunctionHandle r;
    r.dim_ = a.dim_;
    SmoothPiece p;
    p.value = [pa, pb](const Vec& x) { return pa.value(x) * pb.value(x); };
    p.gradient = [pa, pb](const Vec& x) {
        Vec g = scaled(pa.gradient(x), pb.value(x));
        return axpy(pa.value(x), pb.gradient(x), g);
    };
    r.convex_.push_back(std::move(p));
    r.label = "(" + a.label + ")*(" + b.label + ")";
    return r;
}

FunctionHandle FunctionHandle::lift_dimension(const FunctionHandle& f) {
    auto lift_piece = [](const SmoothPiece& p) {
        SmoothPiece q;
        q.value = [p](const Vec& x) {
            Vec y(x.begin(), x.end() - 1);
            return p.value(y);
        };
        q.gradient = [p](const Vec& x) {
            Vec y(x.begin(), x.end() - 1);
            Vec g = p.gradient(y);
            g.push_back(0.0);
            return g;
        };
        q.affine = p.affine;
        return q;
    };
    FunctionHandle r;
    r.dim_ = f.dim_ + 1;
    for (const auto& p : f.convex_) r.convex_.push_back(lift_piece(p));
    for (const auto& p : f.concave_) r.concave_.push_back(lift_piece(p));
    if (f.opaque_) {
        auto g = f.opaque_;
        r.opaque_ = [g](const Vec& x) {
            Vec y(x.begin(), x.end() - 1);
            return g(y);
        };
    }
    r.lipschitz_hint = f.lipschitz_hint;
    r.declared_convex = f.declared_convex;
    r.label = f.label;
    return r;
}

FuncStructure FunctionHandle::structure() const {
    if (convex_.empty()) return FuncStructure::Blackbox;
    if (!concave_.empty()) {
        if (concave_.size() == 1 && convex_.size() == 1) return FuncStructure::Smooth;
        return FuncStructure::DC;
    }
    return convex_.size() == 1 ? FuncStructure::Smooth : FuncStructure::MaxOfSmooth;
}

bool FunctionHandle::piecewise_affine() const {
    if (convex_.empty()) return false;
    for (const auto& p : convex_)
        if (!p.affine) return false;
    for (const auto& p : concave_)
        if (!p.affine) return false;
    return true;
}

bool FunctionHandle::convex_structured() const {
    if (convex_.empty()) return false;
    if (concave_.size() > 1) return false;
    if (concave_.size() == 1 && !concave_[0].affine) return false;
    if (convex_.size() > 1) {
        for (const auto& p : convex_)
            if (!p.affine) return false; // max of affine: convex for sure
    }
    return convex_.size() == 1 ? declared_convex || convex_[0].affine : true;
}

double FunctionHandle::convex_value(const Vec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : convex_) m = std::max(m, p.value(x));
    return m;
}

double FunctionHandle::concave_value(const Vec& x) const {
    if (concave_.empty()) return 0.0;
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : concave_) m = std::max(m, p.value(x));
    return m;
}

double FunctionHandle::eval(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("handle eval: dimension mismatch on '" + label + "'");
    if (convex_.empty()) {
        if (!opaque_) throw std::logic_error("handle eval: empty handle");
        return opaque_(x);
    }
    return convex_value(x) - concave_value(x);
}

std::vector<int> FunctionHandle::active_convex(const Vec& x, double eps) const {
    std::vector<int> act;
    double m = convex_value(x);
    for (std::size_t i = 0; i < convex_.size(); ++i)
        if (convex_[i].value(x) >= m - eps) act.push_back(static_cast<int>(i));
    return act;
}

std::vector<int> FunctionHandle::active_concave(const Vec& x, double eps) const {
    std::vector<int> act;
    if (concave_.empty()) return act;
    double m = concave_value(x);
    for (std::size_t i = 0; i < concave_.size(); ++i)
        if (concave_[i].value(x) >= m - eps) act.push_back(static_cast<int>(i));
    return act;
}

double FunctionHandle::dir_deriv(const Vec& x, const Vec& v, double eps_active) const {
    if (!has_structure())
        throw std::logic_error("dir_deriv: handle '" + label + "' has no structure");
    double dplus = -std::numeric_limits<double>::infinity();
    for (int i : active_convex(x, eps_active))
        dplus = std::max(dplus, dot(convex_[i].gradient(x), v));
    double dminus = 0.0;
    if (!concave_.empty()) {
        dminus = -std::numeric_limits<double>::infinity();
        for (int j : active_concave(x, eps_active))
            dminus = std::max(dminus, dot(concave_[j].gradient(x), v));
    }
    return dplus - dminus;
}

double fd_dir_derivative_oracle(const std::function<double(const Vec&)>& f, const Vec& x,
                                const Vec& v, const std::vector<double>& steps_in) {
    std::vector<double> steps = steps_in;
    if (steps.empty()) {
        double t = 1e-2;
        for (int i = 0; i < 14; ++i) {
            steps.push_back(t);
            t *= 0.25;
        }
    }
    const double f0 = f(x);
    std::vector<double> q;
    q.reserve(steps.size());
    for (double tau : steps) q.push_back((f(axpy(tau, v, x)) - f0) / tau);
    if (q.size() == 1) return q[0];
    // One Richardson sweep assuming error ~ C*tau with step ratio 4.
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) r.push_back((4.0 * q[i + 1] - q[i]) / 3.0);
    // Return the most stabilized extrapolant.
    double best = r.back();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        double gap = std::fabs(r[i + 1] - r[i]);
        if (gap <= best_gap) {
            best_gap = gap;
            best = r[i + 1];
        }
    }
    return best;
}

double fd_dir_derivative_oracle(const FunctionHandle& f, const Vec& x, const Vec& v,
                                const std::vector<double>& steps) {
    return fd_dir_derivative_oracle([&f](const Vec& y) { return f.eval(y); }, x, v, steps);
}

LipschitzEstimate estimate_lipschitz(const FunctionHandle& f, const PolyhedralSet& set,
                                     int samples, Rng& rng) {
    if (f.lipschitz_hint) {
        LipschitzEstimate e;
        e.value = *f.lipschitz_hint;
        e.method = LipschitzMethod::UserHint;
        return e;
    }
    if (!set.bounded())
        throw std::invalid_argument("estimate_lipschitz: unbounded set without a hint");
    if (samples < 2) throw std::invalid_argument("estimate_lipschitz: samples >= 2 required");
    Vec blo, bhi;
    set.sampling_box(&blo, &bhi);
    auto draw = [&]() {
        for (int tries = 0; tries < 10000; ++tries) {
            Vec x = rng.uniform_vec(blo, bhi);
            if (set.contains(x)) return x;
        }
        throw std::runtime_error("estimate_lipschitz: rejection sampling failed");
    };
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec x = draw(), y = draw();
        double d = norm2(axpy(-1.0, x, y));
        if (d < 1e-12) continue;
        worst = std::max(worst, std::fabs(f.eval(x) - f.eval(y)) / d);
    }
    LipschitzEstimate e;
    e.value = 1.5 * worst;
    e.inflation = 1.5;
    e.samples = samples;
    e.method = LipschitzMethod::SampledSlopes;
    return e;
}

} // namespace hcopt
