// Problem data model: controlled one-dimensional diffusion with a running
// cost, a terminal cost, and expectation constraints on functionals of the
// terminal state (equalities first, then inequalities).
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccs {

using CoefficientFn = std::function<double(double t, double x, double a)>;
using TerminalFn = std::function<double(double x)>;
// Receives the grid times and the interpolated states at those times.
using PathFn = std::function<double(const std::vector<double>& t,
                                    const std::vector<double>& x)>;

enum class ConstraintKind { equality, inequality };

struct ConstraintFunctional {
    ConstraintKind kind = ConstraintKind::equality;
    TerminalFn terminal_map;   // empty => path-only constraint, not DP-compatible
    PathFn path_map;           // optional, Monte-Carlo evaluation only
    double target = 0.0;

    bool dp_compatible() const { return static_cast<bool>(terminal_map); }
};

struct ProblemSpec {
    CoefficientFn drift;          // mu(t, x, a)
    CoefficientFn diffusion;      // sigma(t, x, a) >= 0
    CoefficientFn running_cost;   // L(t, x, a)
    TerminalFn terminal_cost;     // Phi0(x)
    std::vector<ConstraintFunctional> constraints;  // m equalities then l inequalities
    int m = 0;   // number of equality constraints
    int l = 0;   // number of inequality constraints
    double x0 = 0.0;

    // Performance hint: drift, diffusion and running cost ignore (t, x),
    // so one kernel triple per control covers the whole grid.
    bool control_only_coefficients = false;

    int n_constraints() const { return m + l; }

    void validate() const {
        if (!drift || !diffusion || !terminal_cost)
            throw std::invalid_argument("ProblemSpec: drift, diffusion and terminal cost are required");
        if (static_cast<int>(constraints.size()) != m + l)
            throw std::invalid_argument("ProblemSpec: constraint list length must equal m + l");
        for (int i = 0; i < m; ++i)
            if (constraints[i].kind != ConstraintKind::equality)
                throw std::invalid_argument("ProblemSpec: first m constraints must be equalities");
        for (int i = m; i < m + l; ++i)
            if (constraints[i].kind != ConstraintKind::inequality)
                throw std::invalid_argument("ProblemSpec: last l constraints must be inequalities");
    }
};

struct ControlSet {
    std::vector<double> values;
    std::string label;

    ControlSet() = default;
    ControlSet(std::vector<double> vals, std::string lab = "user grid")
        : values(std::move(vals)), label(std::move(lab)) {
        if (values.empty())
            throw std::invalid_argument("ControlSet: empty control set");
        for (std::size_t i = 0; i < values.size(); ++i)
            for (std::size_t j = i + 1; j < values.size(); ++j)
                if (values[i] == values[j])
                    throw std::invalid_argument("ControlSet: duplicate control value");
    }

    static ControlSet uniform(double lo, double hi, double step) {
        if (step <= 0) throw std::invalid_argument("ControlSet: step must be positive");
        const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        std::vector<double> vals;
        vals.reserve(n + 1);
        for (int i = 0; i <= n; ++i) vals.push_back(lo + i * step);
        return ControlSet(std::move(vals), "uniform grid");
    }

    int size() const { return static_cast<int>(values.size()); }
};

// Multiplier vector; coordinates m..m+l-1 belong to inequality constraints
// and must stay nonnegative.
struct DualPoint {
    std::vector<double> v;

    DualPoint() = default;
    explicit DualPoint(std::vector<double> vals) : v(std::move(vals)) {}
    static DualPoint zeros(int n) { return DualPoint(std::vector<double>(n, 0.0)); }

    int size() const { return static_cast<int>(v.size()); }
    double operator[](int i) const { return v[i]; }

    void validate(const ProblemSpec& spec) const {
        if (size() != spec.n_constraints())
            throw std::invalid_argument("DualPoint: dimension mismatch");
        for (int j = spec.m; j < spec.m + spec.l; ++j)
            if (v[j] < 0.0)
                throw std::invalid_argument("DualPoint: inequality multiplier must be nonnegative");
    }
};

// Terminal Lagrangian payoff: Phi0(x) + sum_i lambda_i (Psi_i(x) - target_i).
inline double lagrangian_terminal(double x, const DualPoint& lambda, const ProblemSpec& spec) {
    if (lambda.size() != spec.n_constraints())
        throw std::invalid_argument("lagrangian_terminal: multiplier dimension mismatch");
    double v = spec.terminal_cost(x);
    for (int i = 0; i < spec.n_constraints(); ++i) {
        const auto& c = spec.constraints[i];
        if (!c.dp_compatible())
            throw std::invalid_argument("path-dependent constraint not DP-compatible");
        v += lambda[i] * (c.terminal_map(x) - c.target);
    }
    return v;
}

} // namespace ccs
