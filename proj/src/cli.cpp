#include "hcopt/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hcopt/config.hpp"
#include "hcopt/continuation.hpp"
#include "hcopt/expression.hpp"
#include "hcopt/lift.hpp"
#include "hcopt/oracle.hpp"
#include "hcopt/reports.hpp"

namespace hcopt {

namespace {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::PseudoBStationary: return "pseudo-B-stationary";
        case Verdict::LinearizedStationary: return "stationary-wrt-linearized-cone";
        case Verdict::Fails: return "fails";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* acq_name(AcqEvidence a) {
    switch (a) {
        case AcqEvidence::PiecewisePolyhedral: return "piecewise-polyhedral";
        case AcqEvidence::DirectionalSlater: return "directional-slater";
        case AcqEvidence::None: return "none";
    }
    return "?";
}

const char* method_name(CertMethod m) {
    switch (m) {
        case CertMethod::LinearizedLP: return "linearized-lp";
        case CertMethod::PieceEnumeration: return "piece-enumeration";
        case CertMethod::DirectionSampling: return "direction-sampling";
    }
    return "?";
}

const char* cond_name(CondStatus s) {
    switch (s) {
        case CondStatus::Pass: return "pass";
        case CondStatus::Fail: return "fail";
        case CondStatus::Unverified: return "unverified";
        case CondStatus::NotApplicable: return "not-applicable";
    }
    return "?";
}

ApproxFamily family_by_tag(const std::string& tag) {
    if (tag == "modified-hinge") return make_modified_hinge();
    if (tag == "truncated-hinge") return make_truncated_hinge();
    if (tag == "steklov-symmetric") {
        SteklovSpec s;
        s.symmetric = true;
        return make_steklov_cdf(s);
    }
    if (tag == "steklov-asymmetric") {
        SteklovSpec s;
        s.symmetric = false;
        s.lower_end = [](double d) { return d * d; };
        s.upper_end = [](double d) { return d; };
        return make_steklov_cdf(s);
    }
    throw std::invalid_argument("unknown family tag '" + tag +
                                "' (modified-hinge, truncated-hinge, steklov-symmetric, "
                                "steklov-asymmetric)");
}

Vec default_start(const PolyhedralSet& X) {
    Vec x(X.n, 0.0);
    for (int i = 0; i < X.n; ++i) {
        double lo = std::isfinite(X.lo[i]) ? X.lo[i] : -1.0;
        double hi = std::isfinite(X.hi[i]) ? X.hi[i] : 1.0;
        x[i] = 0.5 * (lo + hi);
    }
    return x;
}

std::string sides_string(const BranchAssignment& b) {
    std::string s;
    for (BranchSide side : b.obj_sides) s += side == BranchSide::Up ? 'U' : 'D';
    s += "|";
    for (BranchSide side : b.con_sides) s += side == BranchSide::Up ? 'U' : 'D';
    return s;
}

struct LambdaInfo {
    double value = 0.0;
    bool automatic = false;
    PenaltyChoice choice;
};

LambdaInfo resolve_lambda(const RunConfig& cfg, const ProblemSpec& p, Rng& rng) {
    LambdaInfo info;
    if (cfg.lambda_mode == "auto") {
        info.automatic = true;
        info.choice = choose_penalty(p, cfg.safety, rng);
        info.value = info.choice.lambda;
    } else {
        info.value = std::stod(cfg.lambda_mode);
    }
    return info;
}

void describe_lambda(TextReport& rep, const LambdaInfo& li) {
    rep.kv("lambda", fmt_g(li.value));
    if (!li.automatic) {
        rep.kv("lambda mode", "user-provided");
        return;
    }
    rep.kv("lambda mode", "auto (safety * (Lip_c + K * Lip_phi) + 1)  [penalty-threshold]");
    rep.kv("safety", fmt_g(li.choice.safety));
    rep.kv("Lip_c estimate", fmt_g(li.choice.lip_c));
    rep.kv("Lip_phi max estimate", fmt_g(li.choice.lip_phi_max));
    bool sampled = false;
    for (const auto& e : li.choice.estimates)
        if (e.method == LipschitzMethod::SampledSlopes) sampled = true;
    if (sampled)
        rep.line("note: sampled Lipschitz estimates are heuristic (max quotient x1.5)");
}

void describe_certificate(TextReport& rep, const StationarityCertificate& cert) {
    rep.kv("point", fmt_vec(cert.point));
    rep.kv("verdict", verdict_name(cert.verdict));
    rep.kv("method", method_name(cert.method));
    rep.kv("acq evidence", acq_name(cert.acq));
    rep.kv("min directional derivative", fmt_g(cert.min_dd));
    if (cert.verdict == Verdict::Fails) rep.kv("descent witness", fmt_vec(cert.witness));
    if (cert.convex_like_upgrade) rep.kv("upgrade", "pseudo local minimizer (ACQ + convex-like)");
    if (!cert.note.empty()) rep.kv("note", cert.note);
    rep.line("property: pseudo-b-stationarity fixed-point check");
    rep.line("caveat: stage points are dd_tol-approximate d-stationary, not exact");
}

// ---- command handlers ---------------------------------------------------

int cmd_validate(const RunConfig& cfg, const ProblemConfig& pc) {
    const ProblemSpec& p = pc.spec;
    ProblemSpec canon = canonicalize(p);
    Rng rng(cfg.seed);

    TextReport rep;
    rep.kv("command", "validate");
    rep.kv("dimension", std::to_string(p.dimension()));
    rep.kv("objective terms (K)", std::to_string(canon.K()));
    rep.kv("constraint terms (L)", std::to_string(canon.L()));
    rep.kv("budget", fmt_g(canon.budget));
    rep.kv("canonical (open terms only)", is_canonical(canon) ? "yes" : "no");
    rep.kv("bounded set", p.feasible_set.bounded() ? "yes" : "no");

    CsvTable csv({"side", "term", "mode", "pass", "exact", "vacuous", "min_value", "note",
                  "property"});
    auto emit = [&](SignMode mode, const char* mode_name, const char* tag) {
        SignConditionReport r = check_sign_conditions(canon, mode, rng);
        bool all = r.all_pass();
        for (const auto& row : r.rows) {
            csv.add_row({row.constraint_side ? "constraint" : "objective",
                         std::to_string(row.term + 1), mode_name, row.pass ? "1" : "0",
                         row.exact ? "1" : "0", row.vacuous ? "1" : "0", fmt_g(row.min_value),
                         row.note, tag});
        }
        rep.kv(std::string("sign condition ") + mode_name, all ? "pass" : "fail");
    };
    emit(SignMode::ZeroSet, "zero-set", "sign-condition:zero-set");
    emit(SignMode::Sublevel, "sublevel", "sign-condition:sublevel");

    write_file(cfg.outdir, "signs.csv", csv.to_string());
    write_file(cfg.outdir, "summary.txt", rep.to_string());
    std::cout << rep.to_string();
    return 0;
}

int cmd_check(const RunConfig& cfg, const ProblemConfig& pc) {
    const ProblemSpec& p = pc.spec;
    if (static_cast<int>(cfg.at_point.size()) != p.dimension())
        throw std::invalid_argument("check: --at needs one value per coordinate");
    StationarityCertificate cert = check_pseudo_b_stationary(p, cfg.at_point, cfg.tol);
    TextReport rep;
    rep.kv("command", "check");
    describe_certificate(rep, cert);
    write_file(cfg.outdir, "certificate.txt", rep.to_string());
    std::cout << rep.to_string();
    if (cfg.assert_mode && !cert.stationary()) return 4;
    return 0;
}

int cmd_multipliers(const RunConfig& cfg, const ProblemConfig& pc) {
    const ProblemSpec& p = pc.spec;
    if (static_cast<int>(cfg.at_point.size()) != p.dimension())
        throw std::invalid_argument("multipliers: --at needs one value per coordinate");
    MultiplierMode mode;
    if (cfg.multiplier_mode == "necessary")
        mode = MultiplierMode::Necessary;
    else if (cfg.multiplier_mode == "sufficientB")
        mode = MultiplierMode::SufficientB;
    else if (cfg.multiplier_mode == "sufficientC")
        mode = MultiplierMode::SufficientC;
    else
        throw std::invalid_argument("multipliers: mode must be necessary|sufficientB|sufficientC");

    MultiplierReport mr = enumerate_multiplier_family(p, cfg.at_point, mode, cfg.tol);
    CsvTable csv({"xi", "mu", "verdict", "min_dd", "property"});
    for (const auto& e : mr.entries) {
        std::string xi, mu;
        for (int b : e.xi) xi += std::to_string(b);
        for (int b : e.mu) mu += std::to_string(b);
        csv.add_row({xi.empty() ? "-" : xi, mu.empty() ? "-" : mu, verdict_name(e.verdict),
                     fmt_g(e.min_dd), "binary-multiplier-family"});
    }
    TextReport rep;
    rep.kv("command", "multipliers");
    rep.kv("mode", cfg.multiplier_mode);
    rep.kv("point", fmt_vec(cfg.at_point));
    rep.kv("subproblems", std::to_string(mr.entries.size()));
    rep.kv("aggregate", mr.aggregate_pass ? "pass" : "fail");
    rep.kv("aggregation rule",
           mode == MultiplierMode::Necessary ? "exists-(xi,mu) pass" : "for-all-(xi,mu) pass");
    if (mode == MultiplierMode::SufficientC) {
        rep.kv("multiplier-sign precondition", mr.precondition_ok ? "holds" : "violated");
        if (!mr.precondition_note.empty()) rep.kv("precondition detail", mr.precondition_note);
    }
    write_file(cfg.outdir, "multipliers.csv", csv.to_string());
    write_file(cfg.outdir, "summary.txt", rep.to_string());
    std::cout << rep.to_string();
    if (cfg.assert_mode && !mr.aggregate_pass) return 4;
    return 0;
}

struct LiftRun {
    LiftResult result;
    LambdaInfo lambda;
    StationarityCertificate certificate;
    bool certificate_ran = false;
};

LiftRun do_lift(const RunConfig& cfg, const ProblemSpec& p) {
    Rng rng(cfg.seed);
    LiftRun out;
    out.lambda = resolve_lambda(cfg, p, rng);
    Vec x0 = cfg.at_point.empty() ? default_start(p.feasible_set) : cfg.at_point;
    InnerStop stop;
    stop.piece_budget = cfg.tol.piece_budget;
    out.result = solve_lifted(p, out.lambda.value, cfg.branch_budget, x0, stop, cfg.tol);
    if (out.result.solved && out.result.recovered.functional_feasible) {
        out.certificate = check_pseudo_b_stationary(p, out.result.x, cfg.tol);
        out.certificate_ran = true;
    }
    return out;
}

void write_lift_reports(const RunConfig& cfg, const LiftRun& run, TextReport& rep) {
    const LiftResult& lr = run.result;
    describe_lambda(rep, run.lambda);
    CsvTable csv({"branch", "sides", "feasible", "converged", "iterations", "objective", "x",
                  "note", "property"});
    for (std::size_t i = 0; i < lr.branches.size(); ++i) {
        const BranchOutcome& b = lr.branches[i];
        csv.add_row({std::to_string(i), sides_string(b.branch), b.feasible ? "1" : "0",
                     b.inner.converged ? "1" : "0", std::to_string(b.inner.iterations),
                     b.feasible ? fmt_g(b.lifted_objective) : "-",
                     b.feasible ? fmt_vec(b.x) : "-", b.feasible ? b.inner.note : b.note,
                     "epigraph-branch"});
    }
    write_file(cfg.outdir, "branches.csv", csv.to_string());
    if (!lr.solved) {
        rep.line("no feasible branch solved");
        return;
    }
    std::string ties;
    for (std::size_t i = 0; i < lr.best.size(); ++i)
        ties += (i ? " " : "") + std::to_string(lr.best[i]);
    rep.kv("best branches (ties reported, no selection)", ties);
    rep.kv("lifted objective", fmt_g(lr.lifted_objective));
    rep.kv("x", fmt_vec(lr.x));
    rep.kv("t (branch)", fmt_vec(lr.t));
    rep.kv("s (branch)", fmt_vec(lr.s));
    rep.kv("t (recovered, objective side exact)", fmt_vec(lr.recovered.t));
    rep.kv("s (recovered)", fmt_vec(lr.recovered.s));
    rep.kv("aux case tag", lr.recovered.tag == RecoverCase::FeasibleWithSlack
                               ? "feasible-with-slack"
                               : "all-equalities");
    rep.kv("functional value (pulled)", fmt_g(lr.recovered.functional_value));
    rep.kv("functional feasible", lr.recovered.functional_feasible ? "yes" : "no");
    if (run.certificate_ran) {
        rep.line("");
        rep.line("certificate at the recovered point:");
        describe_certificate(rep, run.certificate);
    } else if (!lr.recovered.functional_feasible) {
        rep.line("recovered point infeasible: certificate skipped, penalty likely below "
                 "the threshold  [penalty-threshold]");
    }
}

int cmd_lift(const RunConfig& cfg, const ProblemConfig& pc) {
    LiftRun run = do_lift(cfg, canonicalize(pc.spec));
    TextReport rep;
    rep.kv("command", "lift");
    write_lift_reports(cfg, run, rep);
    write_file(cfg.outdir, "lift.txt", rep.to_string());
    std::cout << rep.to_string();
    if (!run.result.solved) return 3;
    if (!run.result.branches[run.result.best.front()].inner.converged) return 3;
    if (cfg.assert_mode && run.certificate_ran && !run.certificate.stationary()) return 4;
    return 0;
}

struct ApproxRun {
    ContinuationTrace trace;
    ConditionReport conditions;
    WeakPseudoReport weak;
    bool weak_ran = false;
    StationarityCertificate certificate;
    bool certificate_ran = false;
    LambdaInfo lambda;
    int start_index = 0;
    std::vector<std::pair<Vec, double>> starts; // start point, final objective
};

ApproxRun do_approx_solve(const RunConfig& cfg, const ProblemSpec& p) {
    ApproxRun out;
    Rng rng(cfg.seed);
    out.lambda = resolve_lambda(cfg, p, rng);
    ApproxFamily fam = family_by_tag(cfg.family);
    ContinuationSchedule sched;
    sched.delta0 = cfg.delta0;
    sched.rho = cfg.rho;
    sched.stages = cfg.stages;

    std::vector<Vec> starts;
    starts.push_back(default_start(p.feasible_set));
    if (cfg.starts > 1 && p.feasible_set.bounded()) {
        Vec blo, bhi;
        p.feasible_set.sampling_box(&blo, &bhi);
        while (static_cast<int>(starts.size()) < cfg.starts) {
            Vec x = rng.uniform_vec(blo, bhi);
            if (p.feasible_set.contains(x)) starts.push_back(x);
        }
    }
    InnerStop stop;
    stop.piece_budget = cfg.tol.piece_budget;
    bool have_best = false;
    double best_value = 0.0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::vector<ApproxFamily> ofams = p.K() > 0 ? std::vector<ApproxFamily>{fam}
                                                    : std::vector<ApproxFamily>{};
        std::vector<ApproxFamily> cfams = p.L() > 0 ? std::vector<ApproxFamily>{fam}
                                                    : std::vector<ApproxFamily>{};
        ContinuationTrace trace =
            run_continuation(p, ofams, cfams, out.lambda.value, sched, starts[s], stop, cfg.tol);
        double value = p.objective_value(trace.limit);
        bool feasible = trace.functional_feasible_at_limit;
        out.starts.push_back({starts[s], value});
        bool better = !have_best;
        if (have_best) {
            bool best_feasible = out.trace.functional_feasible_at_limit;
            better = (feasible && !best_feasible) ||
                     (feasible == best_feasible && value < best_value - 1e-12);
        }
        if (better) {
            have_best = true;
            best_value = value;
            out.trace = std::move(trace);
            out.start_index = static_cast<int>(s);
        }
    }
    Rng diag_rng(cfg.seed ^ 0x9e3779b9ULL);
    out.conditions = diagnose_conditions(out.trace, p, diag_rng, cfg.tol);
    const ConditionEntry* c3 = out.conditions.find("C3");
    if (c3 && c3->status == CondStatus::Fail) {
        out.weak = weak_pseudo_report(out.trace, p, cfg.tol);
        out.weak_ran = true;
    }
    if (out.trace.functional_feasible_at_limit) {
        ProblemSpec canon = canonicalize(p);
        if (canon.feasible(out.trace.limit, cfg.tol.feas_tol)) {
            out.certificate = check_pseudo_b_stationary(p, out.trace.limit, cfg.tol);
            out.certificate_ran = true;
        }
    }
    return out;
}

void write_approx_reports(const RunConfig& cfg, const ProblemSpec& p, const ApproxRun& run,
                          TextReport& rep) {
    describe_lambda(rep, run.lambda);
    rep.kv("family", cfg.family);
    rep.kv("schedule", "delta0=" + fmt_g(cfg.delta0) + " rho=" + fmt_g(cfg.rho) +
                           " stages=" + std::to_string(cfg.stages));
    rep.kv("starts", std::to_string(run.starts.size()));
    rep.kv("selected start", std::to_string(run.start_index));
    rep.kv("limit", fmt_vec(run.trace.limit));
    rep.kv("limit objective (exact)", fmt_g(p.objective_value(run.trace.limit)));
    rep.kv("x-converged over final stages", run.trace.x_converged ? "yes" : "no");
    rep.kv("functional feasible at limit", run.trace.functional_feasible_at_limit ? "yes" : "no");
    if (!run.trace.note.empty()) rep.kv("note", run.trace.note);

    CsvTable trace_csv({"stage", "delta", "objective", "dd_lp", "iterations", "converged", "x",
                        "theta_obj", "theta_con"});
    for (std::size_t s = 0; s < run.trace.stages.size(); ++s) {
        const StageRecord& r = run.trace.stages[s];
        std::string tk, tl;
        for (double v : r.theta_obj) tk += (tk.empty() ? "" : ";") + fmt_g(v);
        for (double v : r.theta_con) tl += (tl.empty() ? "" : ";") + fmt_g(v);
        trace_csv.add_row({std::to_string(s), fmt_g(r.delta), fmt_g(r.objective), fmt_g(r.dd_lp),
                           std::to_string(r.iterations), r.converged ? "1" : "0", fmt_vec(r.x),
                           tk, tl});
    }
    write_file(cfg.outdir, "trace.csv", trace_csv.to_string());

    CsvTable cond_csv({"condition", "status", "detail", "property"});
    for (const auto& e : run.conditions.entries)
        cond_csv.add_row({e.name, cond_name(e.status), e.detail, "condition:" + e.name});
    write_file(cfg.outdir, "conditions.csv", cond_csv.to_string());

    if (run.weak_ran) {
        rep.line("");
        rep.line("weak-pseudo report (C3 failed):");
        std::string xs, ms;
        for (double v : run.weak.xi_star) xs += (xs.empty() ? "" : " ") + fmt_g(v);
        for (double v : run.weak.mu_star) ms += (ms.empty() ? "" : " ") + fmt_g(v);
        rep.kv("xi*", xs.empty() ? "-" : xs);
        rep.kv("mu*", ms.empty() ? "-" : ms);
        rep.kv("weak functional row", fmt_g(run.weak.weak_row_value) + " <= budget " +
                                          fmt_g(run.weak.budget) + " : " +
                                          (run.weak.weak_row_satisfied ? "yes" : "no"));
        rep.kv("C4' strengthened descent", run.weak.c4prime_pass ? "pass" : "fail");
        rep.kv("C5' regularity", run.weak.c5prime_pass ? "pass" : "unverified");
        rep.kv("weak-problem certificate", verdict_name(run.weak.certificate.verdict));
        rep.line("note: xi*, mu* are means of the final three stage theta values (estimates)");
    }
    if (run.certificate_ran) {
        rep.line("");
        rep.line("certificate at the limit:");
        describe_certificate(rep, run.certificate);
    }
}

int cmd_approx_solve(const RunConfig& cfg, const ProblemConfig& pc) {
    ProblemSpec canon = canonicalize(pc.spec);
    ApproxRun run = do_approx_solve(cfg, canon);
    TextReport rep;
    rep.kv("command", "approx-solve");
    write_approx_reports(cfg, canon, run, rep);
    write_file(cfg.outdir, "approx_solve.txt", rep.to_string());
    std::cout << rep.to_string();
    if (!run.trace.x_converged) return 3;
    if (cfg.assert_mode && run.certificate_ran && !run.certificate.stationary()) return 4;
    return 0;
}

int cmd_approx_suite(const RunConfig& cfg) {
    ApproxFamily fam = family_by_tag(cfg.family);
    AxiomReport report = axiom_suite(fam);
    CsvTable csv({"axiom", "pass", "witness", "witness_value", "property"});
    for (const auto& c : report.checks)
        csv.add_row({c.axiom, c.pass ? "1" : "0", c.witness, fmt_g(c.witness_value),
                     "axiom:" + c.axiom});
    write_file(cfg.outdir, "axioms.csv", csv.to_string());

    std::vector<double> ts;
    for (int i = -40; i <= 40; ++i) ts.push_back(i * 0.05);
    std::vector<double> deltas = {0.5, 0.25, 0.1, 0.05, 0.01};
    FamilyTable table = tabulate_family(fam, ts, deltas);
    CsvTable plot({"t", "delta", "theta"});
    for (std::size_t i = 0; i < table.t.size(); ++i)
        plot.add_row({fmt_g(table.t[i]), fmt_g(table.delta[i]), fmt_g(table.theta[i])});
    write_file(cfg.outdir, "plotdata.csv", plot.to_string());

    TextReport rep;
    rep.kv("command", "approx-suite");
    rep.kv("family", cfg.family);
    rep.kv("all axioms pass", report.all_pass() ? "yes" : "no");
    for (const auto& c : report.checks)
        rep.kv("axiom " + c.axiom,
               std::string(c.pass ? "pass" : "FAIL") + (c.witness.empty() ? "" : " " + c.witness));
    if (fam.known_pointwise_defect)
        rep.line("family carries a known pointwise defect at t = 0 by construction");
    write_file(cfg.outdir, "summary.txt", rep.to_string());
    std::cout << rep.to_string();
    return 0;
}

struct BruteforceRun {
    GridMinimum minimum;
    EquivalenceReport equivalence;
};

BruteforceRun do_bruteforce(const RunConfig& cfg, const ProblemSpec& p) {
    GridSpec grid;
    grid.resolution.assign(p.dimension(), cfg.grid_res);
    grid.refine_levels = cfg.refine;
    grid.max_threads = cfg.threads;
    BruteforceRun out;
    Rng rng(cfg.seed);
    out.equivalence = equivalence_report(p, grid, rng);
    out.minimum = out.equivalence.grid;
    return out;
}

void write_bruteforce_reports(const RunConfig& cfg, const ProblemSpec& p,
                              const BruteforceRun& run, TextReport& rep) {
    GridSpec grid;
    grid.resolution.assign(p.dimension(), cfg.grid_res);
    grid.max_threads = cfg.threads;
    EvaluatedGrid eg = evaluate_grid(canonicalize(p), grid);
    CsvTable csv({"point", "phi", "feasible"});
    for (std::size_t i = 0; i < eg.points.size(); ++i)
        csv.add_row({fmt_vec(eg.points[i]), fmt_g(eg.objective[i]), eg.feasible[i] ? "1" : "0"});
    write_file(cfg.outdir, "grid.csv", csv.to_string());

    CsvTable eq({"variant", "value", "gap", "agrees", "property"});
    for (const auto& row : run.equivalence.rows)
        eq.add_row({row.name, row.feasible_found ? fmt_g(row.value) : "-",
                    row.feasible_found ? fmt_g(row.gap) : "-", row.agrees ? "1" : "0",
                    "equivalence:" + row.name});
    write_file(cfg.outdir, "equivalence.csv", eq.to_string());

    rep.kv("grid resolution", std::to_string(cfg.grid_res));
    rep.kv("refine levels", std::to_string(cfg.refine));
    rep.kv("points", std::to_string(run.minimum.total_points));
    rep.kv("feasible points", std::to_string(run.minimum.feasible_count));
    rep.kv("minimum", run.minimum.feasible_found ? fmt_g(run.minimum.value) : "infeasible");
    rep.kv("value tolerance (effective)", fmt_g(run.minimum.value_tol_effective));
    if (!run.minimum.argmins.empty()) rep.kv("argmin", fmt_vec(run.minimum.argmins.front()));
    rep.kv("sign condition zero-set", run.equivalence.sign_condition_a ? "pass" : "fail");
    rep.kv("sign condition sublevel", run.equivalence.sign_condition_b ? "pass" : "fail");
    for (const auto& row : run.equivalence.rows)
        rep.kv("equivalence " + row.name,
               (row.agrees ? "agrees" : "GAP") +
                   (row.feasible_found ? " value " + fmt_g(row.value) : " infeasible"));
}

int cmd_bruteforce(const RunConfig& cfg, const ProblemConfig& pc) {
    BruteforceRun run = do_bruteforce(cfg, pc.spec);
    TextReport rep;
    rep.kv("command", "bruteforce");
    write_bruteforce_reports(cfg, pc.spec, run, rep);
    write_file(cfg.outdir, "summary.txt", rep.to_string());
    std::cout << rep.to_string();
    return 0;
}

int cmd_compare(const RunConfig& cfg, const ProblemConfig& pc) {
    ProblemSpec canon = canonicalize(pc.spec);
    TextReport rep;
    rep.kv("command", "compare");

    BruteforceRun bf = do_bruteforce(cfg, canon);
    write_bruteforce_reports(cfg, canon, bf, rep);

    rep.line("");
    rep.line("epigraphical lift:");
    LiftRun lift = do_lift(cfg, canon);
    write_lift_reports(cfg, lift, rep);

    rep.line("");
    rep.line("approximation continuation:");
    ApproxRun approx = do_approx_solve(cfg, canon);
    write_approx_reports(cfg, canon, approx, rep);

    rep.line("");
    rep.line("cross-tabulation:");
    CsvTable cross({"method", "value", "point", "verdict", "property"});
    cross.add_row({"grid", bf.minimum.feasible_found ? fmt_g(bf.minimum.value) : "-",
                   bf.minimum.argmins.empty() ? "-" : fmt_vec(bf.minimum.argmins.front()),
                   "global-on-grid", "oracle"});
    cross.add_row({"lift", lift.result.solved ? fmt_g(canon.objective_value(lift.result.x)) : "-",
                   lift.result.solved ? fmt_vec(lift.result.x) : "-",
                   lift.certificate_ran ? verdict_name(lift.certificate.verdict) : "-",
                   "fixed-point-pipeline"});
    cross.add_row({"continuation", fmt_g(canon.objective_value(approx.trace.limit)),
                   fmt_vec(approx.trace.limit),
                   approx.certificate_ran ? verdict_name(approx.certificate.verdict) : "-",
                   "continuation-pipeline"});
    write_file(cfg.outdir, "compare.csv", cross.to_string());
    rep.line(cross.to_string());
    write_file(cfg.outdir, "compare.txt", rep.to_string());
    std::cout << rep.to_string();
    return 0;
}

} // namespace

int run(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    if (const char* env_out = std::getenv("HCOPT_OUT"); env_out && cfg.outdir == "out")
        cfg.outdir = env_out;
    try {
        if (cfg.command == "approx-suite") return cmd_approx_suite(cfg);
        ProblemConfig pc = load_problem_config(cfg.problem_path);
        RunConfig effective = cfg;
        if (!cfg.seed_from_cli && pc.seed_set) effective.seed = pc.seed;
        if (cfg.command == "validate") return cmd_validate(effective, pc);
        if (cfg.command == "check") return cmd_check(effective, pc);
        if (cfg.command == "multipliers") return cmd_multipliers(effective, pc);
        if (cfg.command == "lift") return cmd_lift(effective, pc);
        if (cfg.command == "approx-solve") return cmd_approx_solve(effective, pc);
        if (cfg.command == "bruteforce") return cmd_bruteforce(effective, pc);
        if (cfg.command == "compare") return cmd_compare(effective, pc);
        std::cerr << "unknown command '" << cfg.command << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Heaviside-composite optimization workbench"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string at_string;
    auto add_common = [&](CLI::App* sub, bool needs_problem) {
        if (needs_problem)
            sub->add_option("problem", cfg.problem_path, "problem configuration file")
                ->required();
        sub->add_option("--out", cfg.outdir, "output directory");
        sub->add_option("--seed", cfg.seed, "seed for all sampling")
            ->each([&](const std::string&) { cfg.seed_from_cli = true; });
        sub->add_option("--threads", cfg.threads, "parallel evaluation cap");
        sub->add_flag("--assert", cfg.assert_mode, "exit 4 on certificate failure");
    };

    CLI::App* validate = app.add_subcommand("validate", "model and sign-condition report");
    add_common(validate, true);

    CLI::App* check = app.add_subcommand("check", "pseudo-B-stationarity certificate");
    add_common(check, true);
    check->add_option("--at", at_string, "point, comma separated")->required();

    CLI::App* mult = app.add_subcommand("multipliers", "binary multiplier family table");
    add_common(mult, true);
    mult->add_option("--at", at_string, "point, comma separated")->required();
    mult->add_option("--mode", cfg.multiplier_mode, "necessary|sufficientB|sufficientC");

    CLI::App* lift = app.add_subcommand("lift", "penalized epigraphical branch solve");
    add_common(lift, true);
    lift->add_option("--lambda", cfg.lambda_mode, "auto or a value");
    lift->add_option("--safety", cfg.safety, "penalty safety factor");
    lift->add_option("--branch-budget", cfg.branch_budget, "max branches");

    CLI::App* approx = app.add_subcommand("approx-solve", "delta-continuation solve");
    add_common(approx, true);
    approx->add_option("--family", cfg.family, "approximation family tag");
    approx->add_option("--lambda", cfg.lambda_mode, "auto or a value");
    approx->add_option("--safety", cfg.safety, "penalty safety factor");
    approx->add_option("--delta0", cfg.delta0, "initial delta");
    approx->add_option("--rho", cfg.rho, "delta shrink factor");
    approx->add_option("--stages", cfg.stages, "continuation stages");
    approx->add_option("--starts", cfg.starts, "multi-start count");

    CLI::App* suite = app.add_subcommand("approx-suite", "axiom report for a family");
    add_common(suite, false);
    suite->add_option("--family", cfg.family, "approximation family tag");

    CLI::App* brute = app.add_subcommand("bruteforce", "grid oracle and enumeration table");
    add_common(brute, true);
    brute->add_option("--grid", cfg.grid_res, "lattice resolution per axis");
    brute->add_option("--refine", cfg.refine, "refinement levels");

    CLI::App* compare = app.add_subcommand("compare", "grid + lift + continuation cross-tab");
    add_common(compare, true);
    compare->add_option("--family", cfg.family, "approximation family tag");
    compare->add_option("--lambda", cfg.lambda_mode, "auto or a value");
    compare->add_option("--grid", cfg.grid_res, "lattice resolution per axis");
    compare->add_option("--stages", cfg.stages, "continuation stages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (!at_string.empty()) {
        std::string token;
        std::istringstream ss(at_string);
        while (std::getline(ss, token, ',')) cfg.at_point.push_back(std::stod(token));
    }
    return run(cfg);
}

} // namespace hcopt
