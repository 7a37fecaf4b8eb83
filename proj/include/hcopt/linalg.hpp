#ifndef HCOPT_LINALG_HPP
#define HCOPT_LINALG_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace hcopt {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec axpy(double alpha, const Vec& x, const Vec& y) {
    assert(x.size() == y.size());
    Vec r(y);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
    return r;
}

inline Vec scaled(const Vec& x, double alpha) {
    Vec r(x);
    for (double& v : r) v *= alpha;
    return r;
}

inline Vec vsum(const Vec& a, const Vec& b) { return axpy(1.0, a, b); }

inline double norm_inf(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double norm1(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += std::fabs(v);
    return s;
}

inline double dist_inf(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline Vec unit(std::size_t n, std::size_t i, double v = 1.0) {
    Vec e(n, 0.0);
    e[i] = v;
    return e;
}

} // namespace hcopt

#endif
