// Built-in problem definitions: the two linear-quadratic reference
// problems with known dual optima, plus parametric families (LQ and a
// bounded-drift variant with state-dependent coefficients) for custom
// configs.
#pragma once

#include "ccs/lq.hpp"
#include "ccs/model.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace ccs {

struct BuiltinProblem {
    std::string name;
    ProblemSpec spec;
    double T = 1.0;
    // Suggested control grid.
    double control_min = -6.0, control_max = 6.0, control_step = 0.1;
    // Analytic references when available.
    std::optional<double> value_ref, lambda_ref;
};

// min E[ int a^2/2 dt + X_T^2 ]  s.t.  E[-X_T + 1] = 0, x0 = 0, T = 1.
inline BuiltinProblem make_example1() {
    BuiltinProblem b;
    b.name = "example1";
    b.spec.drift = [](double, double, double a) { return a; };
    b.spec.diffusion = [](double, double, double) { return 1.0; };
    b.spec.running_cost = [](double, double, double a) { return 0.5 * a * a; };
    b.spec.terminal_cost = [](double x) { return x * x; };
    ConstraintFunctional c;
    c.kind = ConstraintKind::equality;
    c.terminal_map = [](double x) { return -x + 1.0; };
    c.target = 0.0;
    b.spec.constraints = {c};
    b.spec.m = 1;
    b.spec.l = 0;
    b.spec.x0 = 0.0;
    b.spec.control_only_coefficients = true;
    auto [lam, val] = analytic_maximizer(1);
    b.lambda_ref = lam;
    b.value_ref = val;
    return b;
}

// min E[ int a^2/2 dt + X_T^2 ]  s.t.  E[(X_T - 1)^2] - 1/2 <= 0.
inline BuiltinProblem make_example2() {
    BuiltinProblem b;
    b.name = "example2";
    b.spec.drift = [](double, double, double a) { return a; };
    b.spec.diffusion = [](double, double, double) { return 1.0; };
    b.spec.running_cost = [](double, double, double a) { return 0.5 * a * a; };
    b.spec.terminal_cost = [](double x) { return x * x; };
    ConstraintFunctional c;
    c.kind = ConstraintKind::inequality;
    c.terminal_map = [](double x) { return (x - 1.0) * (x - 1.0) - 0.5; };
    c.target = 0.0;
    b.spec.constraints = {c};
    b.spec.m = 0;
    b.spec.l = 1;
    b.spec.x0 = 0.0;
    b.spec.control_only_coefficients = true;
    auto [lam, val] = analytic_maximizer(2);
    b.lambda_ref = lam;
    b.value_ref = val;
    return b;
}

// LQ family: drift a, constant diffusion, running cost a^2/2 (optional),
// quadratic terminal cost. Constraints are supplied by the caller.
inline BuiltinProblem make_lq_family(double sigma, double aT, double bT, double cT,
                                     double x0, bool quadratic_running_cost) {
    BuiltinProblem b;
    b.name = "lq";
    b.spec.drift = [](double, double, double a) { return a; };
    b.spec.diffusion = [sigma](double, double, double) { return sigma; };
    if (quadratic_running_cost)
        b.spec.running_cost = [](double, double, double a) { return 0.5 * a * a; };
    else
        b.spec.running_cost = [](double, double, double) { return 0.0; };
    b.spec.terminal_cost = [aT, bT, cT](double x) { return 0.5 * aT * x * x + bT * x + cT; };
    b.spec.x0 = x0;
    b.spec.control_only_coefficients = true;
    return b;
}

// Bounded-drift family: drift a - kappa tanh(x) (mean reversion, bounded
// for bounded controls), state-damped diffusion. Exercises the general
// (t, x)-dependent DP path.
inline BuiltinProblem make_bounded_drift_family(double kappa, double sigma0, double x0,
                                                bool quadratic_running_cost) {
    BuiltinProblem b;
    b.name = "bounded_drift";
    b.spec.drift = [kappa](double, double x, double a) { return a - kappa * std::tanh(x); };
    b.spec.diffusion = [sigma0](double, double x, double) {
        return sigma0 * (1.0 + 0.5 / (1.0 + x * x));
    };
    if (quadratic_running_cost)
        b.spec.running_cost = [](double, double, double a) { return 0.5 * a * a; };
    else
        b.spec.running_cost = [](double, double, double) { return 0.0; };
    b.spec.terminal_cost = [](double x) { return x * x; };
    b.spec.x0 = x0;
    b.spec.control_only_coefficients = false;
    return b;
}

inline std::optional<BuiltinProblem> lookup_builtin(const std::string& name) {
    if (name == "example1") return make_example1();
    if (name == "example2") return make_example2();
    return std::nullopt;
}

} // namespace ccs
