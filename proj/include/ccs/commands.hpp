// End-to-end pipelines behind the CLI subcommands: problem resolution from
// a RunConfig, discretization sizing, CFL validation, qualification, dual
// ascent, certification, Monte-Carlo cross-checks and the convergence-rate
// study, each emitting its CSV artifacts.
#pragma once

#include "ccs/builtins.hpp"
#include "ccs/chain.hpp"
#include "ccs/config.hpp"
#include "ccs/csv.hpp"
#include "ccs/dp.hpp"
#include "ccs/dual.hpp"
#include "ccs/mc.hpp"
#include "ccs/qualify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace ccs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitCfl = 3;

struct ResolvedProblem {
    std::string name;
    ProblemSpec spec;
    double T = 1.0;
    std::optional<double> value_ref, lambda_ref;
};

namespace detail {

inline TerminalFn make_constraint_map(const ConstraintConfig& cc) {
    if (cc.map == "linear")
        return [c0 = cc.c0, c1 = cc.c1](double x) { return c0 + c1 * x; };
    return [c0 = cc.c0, c1 = cc.c1, c2 = cc.c2](double x) { return c0 + c1 * x + c2 * x * x; };
}

} // namespace detail

inline ResolvedProblem resolve_problem(const RunConfig& c) {
    ResolvedProblem out;
    if (!c.builtin.empty()) {
        auto b = lookup_builtin(c.builtin);
        if (!b) throw ConfigError("<config>", 0, "unknown builtin problem: " + c.builtin);
        if (!c.constraints.empty())
            throw ConfigError("<config>", 0, "builtin problems define their own constraints");
        out.name = b->name;
        out.spec = b->spec;
        out.T = b->T;
        out.value_ref = b->value_ref;
        out.lambda_ref = b->lambda_ref;
        return out;
    }
    BuiltinProblem fam;
    const bool quad = c.running_cost == "quadratic";
    if (c.family == "lq")
        fam = make_lq_family(c.sigma, c.aT, c.bT, c.cT, c.x0, quad);
    else if (c.family == "bounded_drift")
        fam = make_bounded_drift_family(c.kappa, c.sigma, c.x0, quad);
    else
        throw ConfigError("<config>", 0, "unknown problem family: " + c.family);
    out.name = fam.name;
    out.spec = fam.spec;
    out.T = c.T;

    // Equalities first, then inequalities, preserving relative order.
    std::vector<ConstraintFunctional> eqs, ineqs;
    for (const auto& cc : c.constraints) {
        ConstraintFunctional f;
        f.kind = cc.kind == "equality" ? ConstraintKind::equality : ConstraintKind::inequality;
        f.terminal_map = detail::make_constraint_map(cc);
        f.target = cc.target;
        (f.kind == ConstraintKind::equality ? eqs : ineqs).push_back(std::move(f));
    }
    out.spec.m = static_cast<int>(eqs.size());
    out.spec.l = static_cast<int>(ineqs.size());
    out.spec.constraints = std::move(eqs);
    for (auto& f : ineqs) out.spec.constraints.push_back(std::move(f));
    out.spec.validate();
    return out;
}

// Grid bounds covering the bulk of any controlled trajectory: x0 plus six
// diffusion standard deviations widened by the worst drift excursion. The
// coefficient scan iterates twice since the width itself moves the scan
// window.
inline std::pair<double, double> estimate_bounds(const ProblemSpec& spec, const ControlSet& controls,
                                                 double T, double x0) {
    double width = 1.0 + std::abs(x0);
    for (int pass = 0; pass < 3; ++pass) {
        double max_sigma = 0.0, max_mu = 0.0;
        for (int it = 0; it <= 2; ++it) {
            const double t = T * it / 2.0;
            for (int ix = -4; ix <= 4; ++ix) {
                const double x = x0 + width * ix / 4.0;
                for (double a : controls.values) {
                    max_sigma = std::max(max_sigma, std::abs(spec.diffusion(t, x, a)));
                    max_mu = std::max(max_mu, std::abs(spec.drift(t, x, a)));
                }
            }
        }
        width = 6.0 * max_sigma * std::sqrt(T) + max_mu * T;
        if (width <= 0) width = 1.0;
    }
    return {x0 - width, x0 + width};
}

inline KernelVariant kernel_variant_from_name(const std::string& name) {
    if (name == "upwind") return KernelVariant::upwind;
    if (name == "centered") return KernelVariant::centered;
    return KernelVariant::exact;
}

inline Discretization resolve_discretization(const RunConfig& c, const ResolvedProblem& p, double h) {
    const int N = std::max(1, static_cast<int>(std::llround(p.T / h)));
    const double h_eff = p.T / N;
    const double dx = c.dx ? *c.dx : std::sqrt(h_eff / c.cfl_target);
    ControlSet controls = ControlSet::uniform(c.control_min, c.control_max, c.control_step);
    double lo, hi;
    if (c.x_min && c.x_max) {
        lo = *c.x_min;
        hi = *c.x_max;
    } else {
        auto est = estimate_bounds(p.spec, controls, p.T, p.spec.x0);
        lo = c.x_min ? *c.x_min : est.first;
        hi = c.x_max ? *c.x_max : est.second;
    }
    return Discretization::make(p.T, N, dx, p.spec.x0, lo, hi, std::move(controls),
                                kernel_variant_from_name(c.kernel));
}

inline AscentParams resolve_ascent(const RunConfig& c, const ResolvedProblem& p) {
    AscentParams a;
    a.grad_tol = c.grad_tol;
    a.max_iters = c.max_iters;
    a.theta0 = c.theta0.value_or(0.0);
    std::optional<double> target = c.target;
    if (!target && p.value_ref) target = p.value_ref;
    if (c.step == "constant") a.rule = StepRule::constant;
    else if (c.step == "diminishing") a.rule = StepRule::diminishing;
    else if (c.step == "polyak") a.rule = StepRule::polyak;
    else a.rule = target ? StepRule::polyak : StepRule::diminishing;  // auto
    if (a.rule == StepRule::polyak && target) a.polyak_target = *target;
    return a;
}

struct SolveResult {
    int exit_code = kExitOk;
    std::string message;
    Discretization disc;
    ValidationReport cfl;
    QualificationReport qual;
    DualBox box;
    DualSolution sol;
    Certificate cert;
};

inline SolveResult solve_pipeline(const RunConfig& c, const ResolvedProblem& p, double h) {
    SolveResult r;
    r.disc = resolve_discretization(c, p, h);
    r.cfl = validate_cfl(p.spec, r.disc);
    if (!r.cfl.pass) {
        r.exit_code = kExitCfl;
        r.message = "CFL check failed: worst margin " + format_double(r.cfl.worst_margin) +
                    " at (t=" + format_double(r.cfl.worst_t) + ", x=" + format_double(r.cfl.worst_x) +
                    ", a=" + format_double(r.cfl.worst_a) + "), max load " + format_double(r.cfl.cfl_max) +
                    " (reduce h, narrow the control range, or set [disc] kernel = upwind)";
        return r;
    }
    const bool need_margin = !c.eps.has_value();
    if (c.qualify_enabled || need_margin) {
        r.qual = check_qualification(p.spec, r.disc, c.qualify_target_eps, c.qualify_max_iters);
        if (c.qualify_enabled && !r.qual.pass) {
            r.message = "qualification check failed: margin " + format_double(r.qual.margin);
            // Solving still proceeds; the dual box falls back on the floor value.
        }
    } else {
        r.qual.vacuous = true;
        r.qual.pass = true;
        r.qual.margin = std::numeric_limits<double>::infinity();
    }
    r.box = make_dual_box(p.spec, r.disc, r.qual.margin);
    if (c.M) r.box.M = *c.M;
    if (c.eps) r.box.eps = *c.eps;

    r.sol = ascend(p.spec, r.disc, r.box, resolve_ascent(c, p));
    r.cert = certify(p.spec, r.disc, r.sol.lambda_star, r.sol.best_eval.policy, c.cert_tol);
    r.exit_code = (r.sol.converged && r.cert.pass()) ? kExitOk : kExitNotConverged;
    return r;
}

// --- artifact writers -----------------------------------------------------

inline void write_trace_csv(const std::string& path, const DualSolution& sol, int q) {
    CsvWriter w(path);
    w.field("iter");
    for (int i = 0; i < q; ++i) w.field("lambda_" + std::to_string(i + 1));
    w.field("d_h").field("grad_inf").field("step");
    w.endrow();
    for (const auto& row : sol.trace) {
        w.field(row.iter);
        for (int i = 0; i < q; ++i) w.field(i < static_cast<int>(row.lambda.size()) ? row.lambda[i] : 0.0);
        w.field(row.value).field(row.grad_inf).field(row.step);
        w.endrow();
    }
}

inline void write_solution_csv(const std::string& path, const SolveResult& r) {
    CsvWriter w(path);
    w.field("name").field("value").endrow();
    w.field("converged").field(std::string_view(r.sol.converged ? "true" : "false")).endrow();
    w.field("iterations").field(r.sol.iterations).endrow();
    w.field("dual_value").field(r.sol.value).endrow();
    const int q = r.sol.lambda_star.size();
    for (int i = 0; i < q; ++i)
        w.field("lambda_" + std::to_string(i + 1)).field(r.sol.lambda_star[i]).endrow();
    for (int i = 0; i < q; ++i)
        w.field("feasibility_" + std::to_string(i + 1)).field(r.cert.feasibility[i]).endrow();
    w.field("complementarity_gap").field(r.cert.complementarity_gap).endrow();
    w.field("stationarity_gap").field(r.cert.stationarity_gap).endrow();
    w.field("certificate_pass").field(std::string_view(r.cert.pass() ? "true" : "false")).endrow();
    w.field("qualification_margin").field(r.qual.margin).endrow();
    w.field("box_M").field(r.box.M).endrow();
    w.field("box_eps").field(r.box.eps).endrow();
    w.field("cfl_worst_margin").field(r.cfl.worst_margin).endrow();
    w.field("cfl_max_load").field(r.cfl.cfl_max).endrow();
}

inline void write_qualification_csv(const std::string& path, const QualificationReport& rep) {
    CsvWriter w(path);
    w.field("e").field("v_e");
    const int q = rep.rows.empty() ? 0 : static_cast<int>(rep.rows.front().theta.size());
    for (int i = 0; i < q; ++i) w.field("theta_" + std::to_string(i + 1));
    w.field("iterations").endrow();
    for (const auto& row : rep.rows) {
        std::string e;
        for (std::size_t i = 0; i < row.e.size(); ++i) {
            if (i) e += ' ';
            e += row.e[i] > 0 ? "+1" : "-1";
        }
        w.field(std::string_view(e)).field(row.value);
        for (double th : row.theta) w.field(th);
        w.field(row.iterations).endrow();
    }
}

inline void write_value_table_csv(const std::string& path, const ValueTable& table,
                                  const Discretization& disc) {
    CsvWriter w(path);
    w.field("x");
    for (int k = 0; k <= table.N; ++k) w.field("k" + std::to_string(k));
    w.endrow();
    for (int j = 0; j <= table.J; ++j) {
        w.field(disc.x(j));
        for (int k = 0; k <= table.N; ++k) w.field(table.values[k][j]);
        w.endrow();
    }
}

inline void write_distribution_csv(const std::string& path, const GridDistribution& dist,
                                   const Discretization& disc) {
    CsvWriter w(path);
    const int N = static_cast<int>(dist.mass.size()) - 1;
    const int J = static_cast<int>(dist.mass.front().size()) - 1;
    w.field("x");
    for (int k = 0; k <= N; ++k) w.field("k" + std::to_string(k));
    w.endrow();
    for (int j = 0; j <= J; ++j) {
        w.field(disc.x(j));
        for (int k = 0; k <= N; ++k) w.field(dist.mass[k][j]);
        w.endrow();
    }
}

inline void write_echo(const std::string& path, const RunConfig& c) {
    std::ofstream out(path, std::ios::binary);
    write_config_echo(out, c);
}

// --- subcommands ----------------------------------------------------------

inline int cmd_solve(const RunConfig& c, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const ResolvedProblem p = resolve_problem(c);
    if (!c.h) throw ConfigError("<config>", 0, "[disc] h is required for solve");
    fs::create_directories(c.out_dir);
    write_echo(c.out_dir + "/resolved_config.cfg", c);

    SolveResult r = solve_pipeline(c, p, *c.h);
    if (r.exit_code == kExitCfl) {
        log << r.message << "\n";
        return r.exit_code;
    }
    if (!r.message.empty()) log << r.message << "\n";

    write_solution_csv(c.out_dir + "/solution.csv", r);
    if (c.write_trace) write_trace_csv(c.out_dir + "/trace.csv", r.sol, p.spec.n_constraints());
    if (c.qualify_enabled) write_qualification_csv(c.out_dir + "/qualification.csv", r.qual);
    if (c.write_value_table || c.write_distribution) {
        ValueTable table;
        DualEvaluation ev = solve_inner(p.spec, r.disc, r.sol.lambda_star, &table);
        if (c.write_value_table) write_value_table_csv(c.out_dir + "/value_table.csv", table, r.disc);
        if (c.write_distribution) {
            GridDistribution dist = forward_distribution(p.spec, r.disc, ev.policy);
            write_distribution_csv(c.out_dir + "/distribution.csv", dist, r.disc);
        }
    }
    log << "D_h(0) = " << format_double(r.sol.value) << ", lambda* = (";
    for (int i = 0; i < r.sol.lambda_star.size(); ++i)
        log << (i ? ", " : "") << format_double(r.sol.lambda_star[i]);
    log << "), converged = " << (r.sol.converged ? "true" : "false")
        << ", certificate = " << (r.cert.pass() ? "pass" : "fail") << "\n";
    return r.exit_code;
}

struct RateRow {
    double h = 0.0;
    double value = 0.0, value_err = 0.0;
    double lambda = 0.0, lambda_err = 0.0;
    bool has_lambda = false;
};

struct RateFit {
    bool present = false;
    double slope = 0.0, intercept = 0.0;
    int points = 0;
};

struct RateStudyResult {
    std::vector<RateRow> rows;
    RateFit value_fit, lambda_fit;
};

inline RateFit fit_loglog(const std::vector<std::pair<double, double>>& pts) {
    RateFit f;
    std::vector<std::pair<double, double>> logs;
    for (auto [h, e] : pts)
        if (e > 0) logs.push_back({std::log(h), std::log(e)});
    f.points = static_cast<int>(logs.size());
    if (f.points < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = f.points;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    f.present = true;
    return f;
}

inline std::vector<double> default_h_list(bool full_range) {
    if (full_range)
        return {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5};
    return {1e-2, 5e-3, 2e-3, 1e-3, 5e-4};
}

inline int cmd_rate_study(const RunConfig& c, std::ostream& log = std::cout,
                          RateStudyResult* result_out = nullptr) {
    namespace fs = std::filesystem;
    const ResolvedProblem p = resolve_problem(c);
    std::vector<double> hs = c.h_list;
    if (hs.empty()) hs = default_h_list(c.full_range);
    std::sort(hs.begin(), hs.end(), std::greater<double>());

    std::optional<double> value_ref = c.reference_value ? c.reference_value : p.value_ref;
    std::optional<double> lambda_ref = c.reference_lambda ? c.reference_lambda : p.lambda_ref;
    if (!value_ref)
        throw ConfigError("<config>", 0, "rate study needs a reference value (builtin or [rate] reference_value)");

    fs::create_directories(c.out_dir);
    write_echo(c.out_dir + "/resolved_config.cfg", c);

    RateStudyResult study;
    study.rows.resize(hs.size());
    std::vector<SolveResult> solves(hs.size());
    parallel_for(0, static_cast<std::ptrdiff_t>(hs.size()), [&](std::ptrdiff_t i) {
        solves[i] = solve_pipeline(c, p, hs[i]);
    });
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const SolveResult& r = solves[i];
        if (r.exit_code == kExitCfl) {
            log << "rate study aborted at h = " << format_double(hs[i]) << ": " << r.message << "\n";
            return r.exit_code;
        }
        RateRow row;
        row.h = hs[i];
        row.value = r.sol.value;
        row.value_err = std::abs(r.sol.value - *value_ref);
        if (lambda_ref && r.sol.lambda_star.size() == 1) {
            row.lambda = r.sol.lambda_star[0];
            row.lambda_err = std::abs(row.lambda - *lambda_ref);
            row.has_lambda = true;
        }
        study.rows[i] = row;
    }

    std::vector<std::pair<double, double>> vpts, lpts;
    for (const auto& row : study.rows) {
        vpts.push_back({row.h, row.value_err});
        if (row.has_lambda) lpts.push_back({row.h, row.lambda_err});
    }
    study.value_fit = fit_loglog(vpts);
    study.lambda_fit = fit_loglog(lpts);

    {
        CsvWriter w(c.out_dir + "/rate.csv");
        w.field("h").field("V_h").field("err_value").field("lambda_h").field("err_lambda").endrow();
        for (const auto& row : study.rows) {
            w.field(row.h).field(row.value).field(row.value_err);
            if (row.has_lambda)
                w.field(row.lambda).field(row.lambda_err);
            else
                w.field("").field("");
            w.endrow();
        }
    }
    {
        CsvWriter w(c.out_dir + "/rate_fit.csv");
        w.field("series").field("slope").field("intercept").field("points").endrow();
        auto fit_row = [&](const char* name, const RateFit& f) {
            w.field(name);
            if (f.present)
                w.field(f.slope).field(f.intercept);
            else
                w.field("").field("");
            w.field(f.points).endrow();
        };
        fit_row("value", study.value_fit);
        fit_row("lambda", study.lambda_fit);
    }
    auto write_plotdata = [&](const std::string& path, bool lambda_series) {
        std::ofstream out(path, std::ios::binary);
        out << "# h error (plot with: set logscale xy)\n";
        for (const auto& row : study.rows) {
            if (lambda_series && !row.has_lambda) continue;
            out << format_double(row.h) << ' '
                << format_double(lambda_series ? row.lambda_err : row.value_err) << '\n';
        }
    };
    write_plotdata(c.out_dir + "/rate_value.dat", false);
    write_plotdata(c.out_dir + "/rate_lambda.dat", true);

    log << "rate study: value slope = "
        << (study.value_fit.present ? format_double(study.value_fit.slope) : "n/a")
        << ", lambda slope = "
        << (study.lambda_fit.present ? format_double(study.lambda_fit.slope) : "n/a") << "\n";
    if (result_out) *result_out = study;
    return kExitOk;
}

inline int cmd_qualify(const RunConfig& c, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const ResolvedProblem p = resolve_problem(c);
    // The margin only needs a coarse grid; 2e-3 stays CFL-admissible for
    // the exact kernel on the builtin control ranges.
    const double h = c.h ? *c.h : (c.h_list.empty() ? 2e-3 : c.h_list.front());
    Discretization disc = resolve_discretization(c, p, h);
    ValidationReport cfl = validate_cfl(p.spec, disc);
    if (!cfl.pass) {
        log << "CFL check failed at (t=" << format_double(cfl.worst_t)
            << ", x=" << format_double(cfl.worst_x) << ", a=" << format_double(cfl.worst_a) << ")\n";
        return kExitCfl;
    }
    QualificationReport rep = check_qualification(p.spec, disc, c.qualify_target_eps, c.qualify_max_iters);
    fs::create_directories(c.out_dir);
    write_echo(c.out_dir + "/resolved_config.cfg", c);
    write_qualification_csv(c.out_dir + "/qualification.csv", rep);
    log << "qualification: " << (rep.pass ? "pass" : "fail")
        << ", margin = " << format_double(rep.margin) << "\n";
    return rep.pass ? kExitOk : kExitNotConverged;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const ResolvedProblem p = resolve_problem(c);
    if (!c.h) throw ConfigError("<config>", 0, "[disc] h is required for simulate");
    SolveResult r = solve_pipeline(c, p, *c.h);
    if (r.exit_code == kExitCfl) {
        log << r.message << "\n";
        return r.exit_code;
    }
    fs::create_directories(c.out_dir);
    write_echo(c.out_dir + "/resolved_config.cfg", c);

    // Exact forward expectations under the same policy are the oracle.
    const GridDistribution dist = forward_distribution(p.spec, r.disc, r.sol.best_eval.policy);
    ForwardExpectations fe = forward_expectations(p.spec, r.disc, r.sol.best_eval.policy, dist);

    std::vector<PathFn> fns;
    std::vector<std::string> names;
    std::vector<double> exact;
    fns.push_back(terminal_functional(p.spec.terminal_cost));
    names.push_back("phi");
    {
        // fe.cost includes the running cost; report the terminal part alone.
        double term = 0.0;
        for (int j = 0; j <= r.disc.J; ++j)
            if (dist.mass[r.disc.N][j] != 0.0)
                term += dist.mass[r.disc.N][j] * p.spec.terminal_cost(r.disc.x(j));
        exact.push_back(term);
    }
    for (int i = 0; i < p.spec.n_constraints(); ++i) {
        const auto& cf = p.spec.constraints[i];
        if (cf.path_map)
            fns.push_back(cf.path_map);
        else
            fns.push_back(terminal_functional(cf.terminal_map));
        names.push_back("psi_" + std::to_string(i + 1));
        exact.push_back(fe.residuals[i] + cf.target);
    }

    SimConfig sim;
    sim.n_paths = c.n_paths;
    sim.seed = c.seed;
    sim.store_paths = c.store_paths;

    std::ofstream paths_out;
    PathSink sink;
    if (c.store_paths) {
        paths_out.open(c.out_dir + "/paths.csv", std::ios::binary);
        paths_out << "path,time,state\n";
        sink = [&paths_out](long path, const std::vector<double>& t, const std::vector<double>& x) {
            for (std::size_t k = 0; k < t.size(); ++k)
                paths_out << path << ',' << format_double(t[k]) << ',' << format_double(x[k]) << '\n';
        };
    }
    std::vector<SimEstimate> est = simulate(p.spec, r.disc, r.sol.best_eval.policy, fns, sim, sink);

    CsvWriter w(c.out_dir + "/sim.csv");
    w.field("functional").field("mc_mean").field("mc_se").field("ci_lo").field("ci_hi")
        .field("exact").field("abs_diff").endrow();
    for (std::size_t i = 0; i < fns.size(); ++i) {
        w.field(std::string_view(names[i]))
            .field(est[i].mean)
            .field(est[i].se)
            .field(est[i].ci_lo)
            .field(est[i].ci_hi)
            .field(exact[i])
            .field(std::abs(est[i].mean - exact[i]))
            .endrow();
    }
    log << "simulate: " << sim.n_paths << " paths, seed " << sim.seed << "\n";
    return r.exit_code;
}

inline int cmd_certify(const RunConfig& c, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const ResolvedProblem p = resolve_problem(c);
    if (!c.h) throw ConfigError("<config>", 0, "[disc] h is required for certify");
    SolveResult r = solve_pipeline(c, p, *c.h);
    if (r.exit_code == kExitCfl) {
        log << r.message << "\n";
        return r.exit_code;
    }
    fs::create_directories(c.out_dir);
    write_echo(c.out_dir + "/resolved_config.cfg", c);
    CsvWriter w(c.out_dir + "/certificate.csv");
    w.field("name").field("value").endrow();
    for (std::size_t i = 0; i < r.cert.feasibility.size(); ++i)
        w.field("feasibility_" + std::to_string(i + 1)).field(r.cert.feasibility[i]).endrow();
    w.field("complementarity_gap").field(r.cert.complementarity_gap).endrow();
    w.field("stationarity_gap").field(r.cert.stationarity_gap).endrow();
    w.field("feasibility_pass").field(std::string_view(r.cert.feasibility_pass ? "true" : "false")).endrow();
    w.field("complementarity_pass").field(std::string_view(r.cert.complementarity_pass ? "true" : "false")).endrow();
    w.field("stationarity_pass").field(std::string_view(r.cert.stationarity_pass ? "true" : "false")).endrow();
    w.field("pass").field(std::string_view(r.cert.pass() ? "true" : "false")).endrow();
    log << "certificate: " << (r.cert.pass() ? "pass" : "fail") << " at tol "
        << format_double(c.cert_tol) << "\n";
    return r.cert.pass() ? kExitOk : kExitNotConverged;
}

} // namespace ccs
