#ifndef HCOPT_FUNCTION_HANDLE_HPP
#define HCOPT_FUNCTION_HANDLE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcopt/linalg.hpp"
#include "hcopt/rng.hpp"

namespace hcopt {

// One smooth branch of a piecewise function: value plus gradient.
struct SmoothPiece {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    bool affine = false; // gradient constant everywhere
};

enum class FuncStructure { Smooth, MaxOfSmooth, DC, Blackbox };

// A B-differentiable scalar function in structured form,
//
//   f(x) = max_i u_i(x) - max_j w_j(x)
//
// over smooth pieces u_i (convex_parts) and w_j (concave_parts). Smooth
// functions have one convex part and none on the concave side; a pointwise
// max keeps the concave side empty; the general difference form covers
// min/abs compositions. Values and exact one-sided directional derivatives
// fall out of the active pieces. Handles are immutable after construction
// and safe to share across threads.
class FunctionHandle {
public:
    FunctionHandle() = default;

    static FunctionHandle constant(int dim, double c, std::string label = {});
    // a.x + d
    static FunctionHandle affine(Vec a, double d, std::string label = {});
    static FunctionHandle smooth(int dim, std::function<double(const Vec&)> f,
                                 std::function<Vec(const Vec&)> grad,
                                 std::string label = {});
    // Evaluation-only handle; no directional derivatives available.
    static FunctionHandle blackbox(int dim, std::function<double(const Vec&)> f,
                                   std::string label = {});

    static FunctionHandle max_of(const std::vector<FunctionHandle>& fs);
    static FunctionHandle min_of(const std::vector<FunctionHandle>& fs);
    static FunctionHandle abs_of(const FunctionHandle& f);
    static FunctionHandle sum(const std::vector<FunctionHandle>& fs);
    static FunctionHandle scale(const FunctionHandle& f, double alpha);
    static FunctionHandle difference(const FunctionHandle& a, const FunctionHandle& b);
    // Product of two smooth handles (smooth result, product-rule gradient).
    static FunctionHandle smooth_product(const FunctionHandle& a, const FunctionHandle& b);
    // Lift an n-dim handle to n+1 dims (new trailing coordinate is ignored).
    static FunctionHandle lift_dimension(const FunctionHandle& f);

    int dimension() const { return dim_; }
    FuncStructure structure() const;
    bool has_structure() const { return structure() != FuncStructure::Blackbox; }
    bool piecewise_affine() const;
    // Convex by construction: a max of pieces, minus at most one affine piece,
    // where every convex-side piece is affine. (Conservative.)
    bool convex_structured() const;

    double eval(const Vec& x) const;
    double operator()(const Vec& x) const { return eval(x); }

    // Exact one-sided directional derivative from the active-piece formula.
    double dir_deriv(const Vec& x, const Vec& v, double eps_active = 1e-9) const;

    std::vector<int> active_convex(const Vec& x, double eps_active) const;
    std::vector<int> active_concave(const Vec& x, double eps_active) const;
    const std::vector<SmoothPiece>& convex_parts() const { return convex_; }
    const std::vector<SmoothPiece>& concave_parts() const { return concave_; }

    std::optional<double> lipschitz_hint;
    bool declared_convex = false;
    bool monotone_nondecreasing = false; // univariate annotation
    std::string label;

private:
    int dim_ = 0;
    std::vector<SmoothPiece> convex_, concave_;
    std::function<double(const Vec&)> opaque_;

    double convex_value(const Vec& x) const;
    double concave_value(const Vec& x) const;
};

// Richardson-extrapolated one-sided difference quotient; test oracle for the
// structural directional-derivative formulas.
double fd_dir_derivative_oracle(const std::function<double(const Vec&)>& f,
                                const Vec& x, const Vec& v,
                                const std::vector<double>& steps = {});
double fd_dir_derivative_oracle(const FunctionHandle& f, const Vec& x, const Vec& v,
                                const std::vector<double>& steps = {});

struct PolyhedralSet; // fwd

enum class LipschitzMethod { UserHint, SampledSlopes };

struct LipschitzEstimate {
    double value = 0.0;
    LipschitzMethod method = LipschitzMethod::SampledSlopes;
    double inflation = 1.0;
    int samples = 0;
};

LipschitzEstimate estimate_lipschitz(const FunctionHandle& f, const PolyhedralSet& set,
                                     int samples, Rng& rng);

} // namespace hcopt

#endif
