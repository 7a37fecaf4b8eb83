#include "hcopt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hcopt/expression.hpp"

namespace hcopt {

namespace {

double parse_bound_value(const std::string& tok, int line) {
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        return std::stod(tok);
    } catch (...) {
        throw ConfigError("bad numeric value '" + tok + "'", line);
    }
}

struct TermDraft {
    std::string role, flavor;
    std::string multiplier, inner;
    std::optional<double> mult_lip;
    bool mult_convex = false, inner_convex = false;
    int line = 0;
};

struct L0Draft {
    std::string role;
    Vec weights;
    int line = 0;
};

} // namespace

ProblemConfig parse_problem_config(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    enum class Section { None, Problem, Term };
    Section section = Section::None;

    int dimension = -1;
    Vec lo, hi;
    std::vector<LinearRow> rows;
    std::vector<std::pair<std::string, int>> pending_rows; // parsed after dimension is known
    std::string objective_expr;
    int objective_line = 0;
    std::optional<double> objective_lip;
    bool objective_convex = false;
    double budget = 0.0;
    bool budget_set = false;
    ProblemConfig out;
    std::vector<TermDraft> terms;
    std::vector<L0Draft> l0s;

    auto need_dimension = [&](int line) {
        if (dimension <= 0) throw ConfigError("dimension must be declared first", line);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;

        if (key == "problem") {
            section = Section::Problem;
            continue;
        }
        if (key == "term") {
            section = Section::Term;
            terms.push_back({});
            terms.back().line = line_no;
            continue;
        }
        if (key == "l0") { // problem-level directive, accepted anywhere
            need_dimension(line_no);
            L0Draft d;
            d.line = line_no;
            if (!(ls >> d.role)) throw ConfigError("l0 <objective|constraint> w1..wN", line_no);
            double w;
            while (ls >> w) d.weights.push_back(w);
            if (static_cast<int>(d.weights.size()) != dimension)
                throw ConfigError("l0 needs one weight per coordinate", line_no);
            for (double wv : d.weights)
                if (wv < 0)
                    throw ConfigError(
                        "l0 weights must be nonnegative (positivity of the term costs)", line_no);
            l0s.push_back(std::move(d));
            continue;
        }
        if (section == Section::None)
            throw ConfigError("content before any 'problem' section", line_no);

        if (section == Section::Problem) {
            if (key == "dimension") {
                if (!(ls >> dimension) || dimension <= 0)
                    throw ConfigError("dimension must be a positive integer", line_no);
                lo.assign(dimension, -std::numeric_limits<double>::infinity());
                hi.assign(dimension, std::numeric_limits<double>::infinity());
            } else if (key == "bound") {
                need_dimension(line_no);
                std::string which, a, b;
                if (!(ls >> which >> a >> b)) throw ConfigError("bound <i|all> <lo> <hi>", line_no);
                double blo = parse_bound_value(a, line_no);
                double bhi = parse_bound_value(b, line_no);
                if (blo > bhi) throw ConfigError("bound lo exceeds hi", line_no);
                if (which == "all") {
                    lo.assign(dimension, blo);
                    hi.assign(dimension, bhi);
                } else {
                    int idx = 0;
                    try {
                        idx = std::stoi(which);
                    } catch (...) {
                        throw ConfigError("bound index must be an integer or 'all'", line_no);
                    }
                    if (idx < 1 || idx > dimension)
                        throw ConfigError("bound index out of range", line_no);
                    lo[idx - 1] = blo;
                    hi[idx - 1] = bhi;
                }
            } else if (key == "linear") {
                need_dimension(line_no);
                std::string rest;
                std::getline(ls, rest);
                pending_rows.push_back({rest, line_no});
            } else if (key == "objective") {
                std::getline(ls, objective_expr);
                objective_line = line_no;
            } else if (key == "objective_lipschitz") {
                double v;
                if (!(ls >> v) || v < 0) throw ConfigError("bad lipschitz hint", line_no);
                objective_lip = v;
            } else if (key == "objective_convex") {
                objective_convex = true;
            } else if (key == "budget") {
                if (!(ls >> budget)) throw ConfigError("bad budget value", line_no);
                budget_set = true;
            } else if (key == "seed") {
                std::uint64_t s;
                if (!(ls >> s)) throw ConfigError("bad seed value", line_no);
                out.seed = s;
                out.seed_set = true;
            } else {
                throw ConfigError("unknown problem key '" + key + "'", line_no);
            }
        } else { // Term section
            TermDraft& t = terms.back();
            if (key == "role") {
                ls >> t.role;
            } else if (key == "flavor") {
                ls >> t.flavor;
            } else if (key == "multiplier") {
                std::getline(ls, t.multiplier);
            } else if (key == "inner") {
                std::getline(ls, t.inner);
            } else if (key == "multiplier_lipschitz") {
                double v;
                if (!(ls >> v) || v < 0) throw ConfigError("bad lipschitz hint", line_no);
                t.mult_lip = v;
            } else if (key == "multiplier_convex") {
                t.mult_convex = true;
            } else if (key == "inner_convex") {
                t.inner_convex = true;
            } else {
                throw ConfigError("unknown term key '" + key + "'", line_no);
            }
        }
    }

    if (dimension <= 0) throw ConfigError("no dimension declared", line_no);
    for (const auto& [rest, rline] : pending_rows) {
        std::istringstream rs(rest);
        Vec a(dimension);
        for (int i = 0; i < dimension; ++i)
            if (!(rs >> a[i])) throw ConfigError("linear row needs N coefficients", rline);
        std::string op;
        double rhs;
        if (!(rs >> op >> rhs) || (op != "<=" && op != ">="))
            throw ConfigError("linear row needs '<=' or '>=' and a rhs", rline);
        if (op == ">=") {
            a = scaled(a, -1.0);
            rhs = -rhs;
        }
        rows.push_back({std::move(a), rhs});
    }

    ProblemSpec spec;
    try {
        spec.feasible_set = PolyhedralSet::make(dimension, std::move(rows), lo, hi);
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what(), line_no);
    }
    if (objective_expr.empty()) {
        spec.base_cost = FunctionHandle::constant(dimension, 0.0, "0");
    } else {
        try {
            spec.base_cost = compile_expression(objective_expr, dimension);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("objective: ") + ex.what(), objective_line);
        }
    }
    if (objective_lip) spec.base_cost.lipschitz_hint = objective_lip;
    if (objective_convex) spec.base_cost.declared_convex = true;
    spec.budget = budget;

    for (const auto& t : terms) {
        if (t.role != "objective" && t.role != "constraint")
            throw ConfigError("term role must be objective or constraint", t.line);
        if (t.flavor != "open" && t.flavor != "closed")
            throw ConfigError("term flavor must be open or closed", t.line);
        if (t.multiplier.empty() || t.inner.empty())
            throw ConfigError("term needs multiplier and inner expressions", t.line);
        HeavisideTerm term;
        try {
            term.multiplier = compile_expression(t.multiplier, dimension);
            term.inner = compile_expression(t.inner, dimension);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("term: ") + ex.what(), t.line);
        }
        if (t.mult_lip) term.multiplier.lipschitz_hint = t.mult_lip;
        if (t.mult_convex) term.multiplier.declared_convex = true;
        if (t.inner_convex) term.inner.declared_convex = true;
        term.flavor = t.flavor == "open" ? Flavor::Open : Flavor::Closed;
        if (t.role == "objective")
            spec.objective_terms.push_back(std::move(term));
        else
            spec.constraint_terms.push_back(std::move(term));
    }
    for (const auto& d : l0s) {
        if (d.role != "objective" && d.role != "constraint")
            throw ConfigError("l0 role must be objective or constraint", d.line);
        TermRole role = d.role == "objective" ? TermRole::Objective : TermRole::Constraint;
        for (auto& term : build_l0(d.weights, role)) {
            if (role == TermRole::Objective)
                spec.objective_terms.push_back(std::move(term));
            else
                spec.constraint_terms.push_back(std::move(term));
        }
    }
    if (!spec.constraint_terms.empty() && !budget_set)
        throw ConfigError("constraint terms present but no budget declared", line_no);
    spec.validate();
    out.spec = std::move(spec);
    return out;
}

ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_config(ss.str());
}

} // namespace hcopt
