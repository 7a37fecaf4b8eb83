#include "hcopt/polyhedron.hpp"

#include <cmath>
#include <stdexcept>

namespace hcopt {

namespace {
constexpr double kBig = 1e9;
}

PolyhedralSet PolyhedralSet::box(Vec lo, Vec hi) {
    const int n = static_cast<int>(lo.size());
    return make(n, {}, std::move(lo), std::move(hi));
}

PolyhedralSet PolyhedralSet::make(int n, std::vector<LinearRow> rows, Vec lo, Vec hi) {
    if (n <= 0) throw std::invalid_argument("polyhedron: dimension must be positive");
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
        throw std::invalid_argument("polyhedron: bounds size mismatch");
    for (const auto& r : rows)
        if (static_cast<int>(r.a.size()) != n)
            throw std::invalid_argument("polyhedron: row size mismatch");
    PolyhedralSet s;
    s.n = n;
    s.inequalities = std::move(rows);
    s.lo = std::move(lo);
    s.hi = std::move(hi);

    // Nonemptiness check by LP; unbounded coordinates get a large working box.
    LpProblem p;
    p.n = n;
    p.c.assign(n, 0.0);
    for (const auto& r : s.inequalities) {
        p.rows.push_back(r.a);
        p.rhs.push_back(r.rhs);
    }
    p.lo.resize(n);
    p.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        p.lo[i] = std::isfinite(s.lo[i]) ? s.lo[i] : -kBig;
        p.hi[i] = std::isfinite(s.hi[i]) ? s.hi[i] : kBig;
    }
    if (!lp_feasible(p)) throw std::invalid_argument("polyhedron: empty set");
    return s;
}

bool PolyhedralSet::bounded() const {
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return false;
    return true;
}

bool PolyhedralSet::contains(const Vec& x, double tol) const {
    if (static_cast<int>(x.size()) != n) return false;
    for (int i = 0; i < n; ++i) {
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    }
    for (const auto& r : inequalities)
        if (dot(r.a, x) > r.rhs + tol) return false;
    return true;
}

std::vector<LinearRow> PolyhedralSet::tangent_rows(const Vec& x, double tol) const {
    std::vector<LinearRow> rows;
    for (const auto& r : inequalities) {
        if (dot(r.a, x) >= r.rhs - tol) rows.push_back({r.a, 0.0});
    }
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(lo[i]) && x[i] <= lo[i] + tol) {
            Vec a(n, 0.0);
            a[i] = -1.0;
            rows.push_back({a, 0.0}); // -v_i <= 0
        }
        if (std::isfinite(hi[i]) && x[i] >= hi[i] - tol) {
            Vec a(n, 0.0);
            a[i] = 1.0;
            rows.push_back({a, 0.0}); // v_i <= 0
        }
    }
    return rows;
}

double PolyhedralSet::max_step(const Vec& x, const Vec& v) const {
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& r : inequalities) {
        double av = dot(r.a, v);
        if (av > 1e-14) tau = std::min(tau, (r.rhs - dot(r.a, x)) / av);
    }
    for (int i = 0; i < n; ++i) {
        if (v[i] > 1e-14 && std::isfinite(hi[i])) tau = std::min(tau, (hi[i] - x[i]) / v[i]);
        if (v[i] < -1e-14 && std::isfinite(lo[i])) tau = std::min(tau, (lo[i] - x[i]) / v[i]);
    }
    return std::max(tau, 0.0);
}

PolyhedralSet PolyhedralSet::with_appended_coordinate(double new_lo, double new_hi) const {
    PolyhedralSet s;
    s.n = n + 1;
    s.lo = lo;
    s.hi = hi;
    s.lo.push_back(new_lo);
    s.hi.push_back(new_hi);
    for (const auto& r : inequalities) {
        LinearRow row = r;
        row.a.push_back(0.0);
        s.inequalities.push_back(std::move(row));
    }
    return s;
}

void PolyhedralSet::sampling_box(Vec* blo, Vec* bhi) const {
    if (!bounded()) throw std::invalid_argument("polyhedron: sampling box needs bounded set");
    *blo = lo;
    *bhi = hi;
}

} // namespace hcopt
