#include "hcopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace hcopt {

namespace {

std::vector<double> axis_coords(double lo, double hi, int res) {
    std::vector<double> c(res + 1);
    for (int i = 0; i <= res; ++i) c[i] = lo + (hi - lo) * i / res;
    return c;
}

// All inner functions of the problem, for crossing detection.
std::vector<const FunctionHandle*> inner_functions(const ProblemSpec& p) {
    std::vector<const FunctionHandle*> fns;
    for (const auto& t : p.objective_terms) fns.push_back(&t.inner);
    for (const auto& t : p.constraint_terms) fns.push_back(&t.inner);
    return fns;
}

void append_crossings(const ProblemSpec& p, const std::vector<std::vector<double>>& axes,
                      double side_offset_abs, std::vector<Vec>& extra) {
    const int n = p.dimension();
    auto fns = inner_functions(p);
    if (fns.empty()) return;
    for (int axis = 0; axis < n; ++axis) {
        std::vector<int> it(n, 0);
        for (;;) {
            if (it[axis] + 1 <= static_cast<int>(axes[axis].size()) - 1) {
                Vec a(n), b(n);
                for (int d = 0; d < n; ++d) a[d] = b[d] = axes[d][it[d]];
                b[axis] = axes[axis][it[axis] + 1];
                for (const FunctionHandle* g : fns) {
                    double ga = g->eval(a), gb = g->eval(b);
                    if (ga == 0.0 || gb == 0.0) continue;
                    if ((ga < 0) == (gb < 0)) continue;
                    Vec xa = a, xb = b;
                    double va = ga;
                    for (int bis = 0; bis < 60; ++bis) {
                        Vec mid = scaled(vsum(xa, xb), 0.5);
                        double gm = g->eval(mid);
                        if (gm == 0.0) {
                            xa = mid;
                            xb = mid;
                            break;
                        }
                        if ((gm < 0) == (va < 0)) {
                            xa = mid;
                            va = gm;
                        } else {
                            xb = mid;
                        }
                    }
                    Vec cross = scaled(vsum(xa, xb), 0.5);
                    extra.push_back(cross);
                    Vec left = cross, right = cross;
                    left[axis] -= side_offset_abs;
                    right[axis] += side_offset_abs;
                    extra.push_back(left);
                    extra.push_back(right);
                }
            }
            int d = 0;
            for (; d < n; ++d) {
                if (++it[d] < static_cast<int>(axes[d].size()) - (d == axis ? 1 : 0)) break;
                it[d] = 0;
            }
            if (d == n) break;
        }
    }
}

} // namespace

EvaluatedGrid evaluate_grid(const ProblemSpec& p, const GridSpec& grid) {
    const int n = p.dimension();
    if (n > 3) throw std::invalid_argument("grid oracle: dimension beyond the desk-scale limit 3");
    if (!p.feasible_set.bounded()) throw std::invalid_argument("grid oracle: unbounded set");
    if (static_cast<int>(grid.resolution.size()) != n)
        throw std::invalid_argument("grid oracle: resolution size mismatch");

    std::vector<std::vector<double>> axes(n);
    double max_spacing = 0.0;
    for (int d = 0; d < n; ++d) {
        axes[d] = axis_coords(p.feasible_set.lo[d], p.feasible_set.hi[d], grid.resolution[d]);
        max_spacing =
            std::max(max_spacing, (p.feasible_set.hi[d] - p.feasible_set.lo[d]) / grid.resolution[d]);
    }

    EvaluatedGrid out;
    out.max_spacing = max_spacing;
    std::vector<int> it(n, 0);
    for (;;) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = axes[d][it[d]];
        out.points.push_back(std::move(x));
        int d = 0;
        for (; d < n; ++d) {
            if (++it[d] < static_cast<int>(axes[d].size())) break;
            it[d] = 0;
        }
        if (d == n) break;
    }
    if (grid.boundary_snap) {
        double span = 0.0;
        for (int d = 0; d < n; ++d) span = std::max(span, p.feasible_set.hi[d] - p.feasible_set.lo[d]);
        std::vector<Vec> extra;
        append_crossings(p, axes, grid.side_offset * span, extra);
        for (auto& x : extra) {
            bool inside = true;
            for (int d = 0; d < n; ++d)
                if (x[d] < p.feasible_set.lo[d] || x[d] > p.feasible_set.hi[d]) inside = false;
            if (inside) out.points.push_back(std::move(x));
        }
    }

    const long total = static_cast<long>(out.points.size());
    out.objective.resize(total);
    out.functional.resize(total);
    out.feasible.assign(total, false);

    auto worker = [&](long lo_i, long hi_i) {
        for (long i = lo_i; i < hi_i; ++i) {
            const Vec& x = out.points[i];
            out.objective[i] = p.objective_value(x);
            out.functional[i] = p.functional_value(x);
            bool ok = p.feasible_set.contains(x, 1e-12);
            if (ok && p.has_functional_constraint()) ok = out.functional[i] <= p.budget + 1e-12;
            out.feasible[i] = ok;
        }
    };
    int threads = std::max(1, grid.max_threads);
    if (threads == 1 || total < 4096) {
        worker(0, total);
    } else {
        std::vector<std::thread> pool;
        long chunk = (total + threads - 1) / threads;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker, t * chunk, std::min(total, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    // Local variation of the objective between nearby points with identical
    // indicator signatures feeds the effective value tolerance; pairs across
    // a discontinuity would swamp it.
    auto fns = inner_functions(p);
    auto signature = [&](const Vec& x) {
        unsigned sig = 0;
        for (std::size_t f = 0; f < fns.size(); ++f)
            sig = (sig << 1) | (fns[f]->eval(x) > 0.0 ? 1u : 0u);
        return sig;
    };
    double modulus = 0.0;
    for (long i = 1; i < std::min<long>(total, 4000); ++i) {
        double dx = dist_inf(out.points[i - 1], out.points[i]);
        if (dx <= 0.0 || dx > 2.0 * max_spacing) continue;
        if (!fns.empty() && signature(out.points[i - 1]) != signature(out.points[i])) continue;
        modulus = std::max(modulus, std::fabs(out.objective[i] - out.objective[i - 1]) / dx);
    }
    out.modulus = modulus;
    out.value_tol_effective = grid.value_tol + modulus * max_spacing * 1e-3;
    return out;
}

GridMinimum grid_minimize(const ProblemSpec& p, const GridSpec& grid) {
    GridSpec level = grid;
    GridMinimum best;
    double prev_value = std::numeric_limits<double>::infinity();
    for (int lev = 0; lev < std::max(1, grid.refine_levels); ++lev) {
        EvaluatedGrid eg = evaluate_grid(p, level);
        GridMinimum gm;
        gm.total_points = static_cast<long>(eg.points.size());
        gm.value = std::numeric_limits<double>::infinity();
        for (long i = 0; i < gm.total_points; ++i) {
            if (!eg.feasible[i]) continue;
            ++gm.feasible_count;
            gm.value = std::min(gm.value, eg.objective[i]);
        }
        gm.feasible_found = gm.feasible_count > 0;
        gm.value_tol_effective = eg.value_tol_effective;
        if (gm.feasible_found) {
            for (long i = 0; i < gm.total_points; ++i)
                if (eg.feasible[i] && eg.objective[i] <= gm.value + eg.value_tol_effective)
                    gm.argmins.push_back(eg.points[i]);
        }
        // refinement monotonicity: the reported value may only improve
        if (gm.feasible_found && gm.value > prev_value + eg.value_tol_effective)
            gm.value = prev_value;
        prev_value = gm.value;
        best = std::move(gm);
        for (auto& r : level.resolution) r *= 2;
    }
    return best;
}

std::vector<Vec> grid_local_minimizers(const ProblemSpec& p, const GridSpec& grid) {
    EvaluatedGrid eg = evaluate_grid(p, grid);
    const long total = static_cast<long>(eg.points.size());
    std::vector<Vec> out;
    const double reach = 1.5 * eg.max_spacing;
    const int n = p.dimension();

    // bucket points by cell so neighbor scans stay local
    auto cell_of = [&](const Vec& x) {
        long id = 0;
        for (int d = 0; d < n; ++d) {
            long c = static_cast<long>(std::floor((x[d] - p.feasible_set.lo[d]) / reach));
            id = id * 4096 + (c & 4095);
        }
        return id;
    };
    std::map<long, std::vector<long>> buckets;
    for (long i = 0; i < total; ++i)
        if (eg.feasible[i]) buckets[cell_of(eg.points[i])].push_back(i);
    auto neighbors_of = [&](const Vec& x) {
        std::vector<long> res;
        std::vector<int> off(n, -1);
        for (;;) {
            Vec y = x;
            for (int d = 0; d < n; ++d) y[d] += off[d] * reach;
            auto it = buckets.find(cell_of(y));
            if (it != buckets.end())
                for (long j : it->second) res.push_back(j);
            int d = 0;
            for (; d < n; ++d) {
                if (++off[d] <= 1) break;
                off[d] = -1;
            }
            if (d == n) break;
        }
        return res;
    };

    for (long i = 0; i < total; ++i) {
        if (!eg.feasible[i]) continue;
        bool is_min = true;
        for (long j : neighbors_of(eg.points[i])) {
            if (j == i) continue;
            if (dist_inf(eg.points[i], eg.points[j]) <= reach &&
                eg.objective[j] < eg.objective[i] - 1e-12) {
                is_min = false;
                break;
            }
        }
        if (!is_min) continue;
        // local refinement: scan a halved-spacing neighborhood patch
        const Vec& c = eg.points[i];
        const double center_value = eg.objective[i];
        bool confirmed = true;
        std::vector<int> it(n, 0);
        const int steps = 8;
        for (;;) {
            Vec y(n);
            for (int d = 0; d < n; ++d)
                y[d] = c[d] + (it[d] - steps / 2) * (eg.max_spacing / steps * 2.0);
            bool inside = p.feasible_set.contains(y, 1e-12) &&
                          (!p.has_functional_constraint() ||
                           p.functional_value(y) <= p.budget + 1e-12);
            if (inside && p.objective_value(y) < center_value - 1e-9) confirmed = false;
            int d = 0;
            for (; d < n; ++d) {
                if (++it[d] <= steps) break;
                it[d] = 0;
            }
            if (d == n || !confirmed) break;
        }
        if (confirmed) out.push_back(c);
    }
    // dedupe near-identical minima (crossing points sit next to lattice points)
    std::vector<Vec> dedup;
    for (const auto& x : out) {
        bool seen = false;
        for (const auto& y : dedup)
            if (dist_inf(x, y) < 0.5 * eg.max_spacing &&
                std::fabs(p.objective_value(x) - p.objective_value(y)) < 1e-9)
                seen = true;
        if (!seen) dedup.push_back(x);
    }
    return dedup;
}

EnumerationResult solve_mpcc_by_enumeration(const ProblemSpec& p, const GridSpec& grid,
                                            McpVariant variant, long pattern_budget) {
    ProblemSpec canon = is_canonical(p) ? p : canonicalize(p);
    const int K = canon.K();
    if ((1L << K) > pattern_budget)
        throw std::invalid_argument("mpcc enumeration: 2^K exceeds the pattern budget");
    EvaluatedGrid eg = evaluate_grid(canon, grid);

    EnumerationResult out;
    out.variant = variant;
    out.value = std::numeric_limits<double>::infinity();

    const long total = static_cast<long>(eg.points.size());
    std::vector<double> gval(K);
    std::vector<double> phival(K);
    for (long i = 0; i < total; ++i) {
        const Vec& x = eg.points[i];
        if (!p.feasible_set.contains(x, 1e-12)) continue;
        if (canon.has_functional_constraint() && eg.functional[i] > canon.budget + 1e-12)
            continue;
        for (int k = 0; k < K; ++k) {
            gval[k] = canon.objective_terms[k].inner.eval(x);
            phival[k] = canon.objective_terms[k].multiplier.eval(x);
        }
        double base = canon.base_cost.eval(x);
        // Optimal binary pattern pointwise: the objective is linear in the
        // selection variables, so each coordinate optimizes independently and
        // the minimum over patterns decomposes per term.
        double value = base;
        for (int k = 0; k < K; ++k) {
            double on = phival[k];
            switch (variant) {
                case McpVariant::MPCC1:
                    // s=1 needs g >= 0, s=0 needs g <= 0
                    if (gval[k] > 0.0)
                        value += on;
                    else if (gval[k] == 0.0)
                        value += std::min(on, 0.0);
                    break;
                case McpVariant::MPCC2:
                case McpVariant::OnOff:
                    // selection forced on when g > 0, free when g <= 0
                    if (gval[k] > 0.0)
                        value += on;
                    else
                        value += std::min(on, 0.0);
                    break;
            }
        }
        if (value < out.value - 1e-15) {
            out.value = value;
            out.solutions.clear();
        }
        if (value <= out.value + 1e-12) out.solutions.push_back(x);
        out.feasible_found = true;
    }
    if (!out.feasible_found) out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
}

EquivalenceReport equivalence_report(const ProblemSpec& p, const GridSpec& grid, Rng& rng) {
    EquivalenceReport report;
    report.grid = grid_minimize(p, grid);
    SignConditionReport sa = check_sign_conditions(p, SignMode::ZeroSet, rng);
    SignConditionReport sb = check_sign_conditions(p, SignMode::Sublevel, rng);
    report.sign_condition_a = sa.all_pass();
    report.sign_condition_b = sb.all_pass();

    auto add = [&](const char* name, McpVariant variant) {
        EnumerationResult er = solve_mpcc_by_enumeration(p, grid, variant);
        EquivalenceRow row;
        row.name = name;
        row.value = er.value;
        row.feasible_found = er.feasible_found;
        row.gap = er.feasible_found && report.grid.feasible_found
                      ? er.value - report.grid.value
                      : std::numeric_limits<double>::quiet_NaN();
        row.agrees = er.feasible_found && report.grid.feasible_found &&
                     std::fabs(row.gap) <= report.grid.value_tol_effective;
        report.rows.push_back(std::move(row));
    };
    add("mpcc1", McpVariant::MPCC1);
    add("mpcc2", McpVariant::MPCC2);
    add("onoff", McpVariant::OnOff);
    return report;
}

} // namespace hcopt
