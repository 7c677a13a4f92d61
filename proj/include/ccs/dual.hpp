// Outer dual loop: projected supergradient ascent of lambda -> d_h(lambda)
// over the box {inequality coordinates >= 0, ||lambda||_1 <= 2M/eps}, plus
// the complementarity / stationarity optimality certificate.
#pragma once

#include "ccs/dp.hpp"
#include "ccs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ccs {

struct DualBox {
    double M = 1.0;     // uniform bound on |E[objective]|
    double eps = 1.0;   // qualification radius

    double radius() const { return 2.0 * M / eps; }
};

enum class StepRule { constant, diminishing, polyak };

struct AscentParams {
    StepRule rule = StepRule::diminishing;
    double theta0 = 0.0;          // constant / diminishing scale; 0 => radius/||g0||
    double polyak_target = std::numeric_limits<double>::quiet_NaN();  // NaN => adaptive
    double grad_tol = 1e-4;
    int max_iters = 500;
};

struct AscentTraceRow {
    int iter = 0;
    std::vector<double> lambda;
    double value = 0.0;
    double grad_inf = 0.0;
    double step = 0.0;
};

struct DualSolution {
    DualPoint lambda_star;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
    DualEvaluation best_eval;
    std::vector<AscentTraceRow> trace;
};

// Euclidean projection onto {lambda : lambda_i >= 0 for i >= m,
// ||lambda||_1 <= radius}. Inequality coordinates are clipped first; the
// l1 excess is then removed by a common soft-threshold on magnitudes
// (signs preserved), the usual sort-based simplex rule.
inline DualPoint project(const std::vector<double>& raw, int m, const DualBox& box) {
    const int n = static_cast<int>(raw.size());
    std::vector<double> lam(raw);
    for (int i = m; i < n; ++i) lam[i] = std::max(lam[i], 0.0);
    const double radius = box.radius();
    double l1 = 0.0;
    for (double v : lam) l1 += std::abs(v);
    if (l1 > radius) {
        std::vector<double> mag(n);
        for (int i = 0; i < n; ++i) mag[i] = std::abs(lam[i]);
        std::vector<double> sorted(mag);
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        double cum = 0.0, tau = 0.0;
        for (int i = 0; i < n; ++i) {
            cum += sorted[i];
            const double cand = (cum - radius) / (i + 1);
            if (i + 1 == n || sorted[i + 1] <= cand) {
                tau = cand;
                break;
            }
        }
        for (int i = 0; i < n; ++i) {
            const double shrunk = std::max(mag[i] - tau, 0.0);
            lam[i] = std::copysign(shrunk, lam[i]);
        }
    }
    return DualPoint(std::move(lam));
}

namespace detail {

inline double norm_inf(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

inline double norm2_sq(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r += x * x;
    return r;
}

} // namespace detail

// Projected supergradient ascent from lambda_0 = 0. Supergradient ascent is
// not monotone, so the returned multiplier is the best iterate (highest
// d_h seen). The polyak rule without an explicit target tracks
// best-so-far + delta, halving delta after stretches without improvement
// and restarting from the incumbent; steps are capped at one box radius.
inline DualSolution ascend(const ProblemSpec& spec, const Discretization& disc,
                           const DualBox& box, const AscentParams& params) {
    spec.validate();
    const int n = spec.n_constraints();
    const double radius = box.radius();

    DualSolution sol;
    DualPoint lambda = DualPoint::zeros(n);

    if (n == 0) {
        DualEvaluation ev = solve_inner(spec, disc, lambda);
        sol.lambda_star = lambda;
        sol.value = ev.value;
        sol.best_eval = std::move(ev);
        sol.converged = true;
        sol.iterations = 1;
        sol.trace.push_back({0, {}, sol.value, 0.0, 0.0});
        return sol;
    }

    double best = -std::numeric_limits<double>::infinity();
    double theta0 = params.theta0;
    const double target_given = params.polyak_target;
    double delta = std::numeric_limits<double>::quiet_NaN();
    int stall = 0;
    const int stall_limit = 10;

    for (int k = 0; k < params.max_iters; ++k) {
        DualEvaluation ev = solve_inner(spec, disc, lambda);
        const double gnorm_inf = detail::norm_inf(ev.supergradient);
        const double gnorm_sq = detail::norm2_sq(ev.supergradient);

        bool restart = false;
        if (ev.value > best) {
            best = ev.value;
            sol.lambda_star = lambda;
            sol.best_eval = ev;
            sol.value = ev.value;
            stall = 0;
        } else if (params.rule == StepRule::polyak && ++stall >= stall_limit) {
            delta *= 0.5;
            stall = 0;
            restart = true;
        }

        double step = 0.0;
        if (gnorm_inf >= params.grad_tol && gnorm_sq > 0.0) {
            switch (params.rule) {
                case StepRule::constant:
                    step = theta0 > 0 ? theta0 : 1.0;
                    break;
                case StepRule::diminishing:
                    if (theta0 <= 0) theta0 = radius / std::sqrt(gnorm_sq);
                    step = theta0 / std::sqrt(static_cast<double>(k + 1));
                    break;
                case StepRule::polyak: {
                    if (std::isnan(delta))
                        delta = std::isnan(target_given)
                                    ? 0.25 * std::max(1.0, std::abs(ev.value))
                                    : std::max(target_given - ev.value, 1e-3);
                    // A supplied target only guides while it still exceeds the
                    // incumbent; d_h can legitimately overshoot an analytic
                    // continuous-time reference.
                    double target = best + delta;
                    if (!std::isnan(target_given) && target_given > best)
                        target = std::min(target, target_given);
                    step = std::max(target - ev.value, 0.0) / gnorm_sq;
                    break;
                }
            }
            // Never step further than one box radius.
            const double len = step * std::sqrt(gnorm_sq);
            if (len > radius) step = radius / std::sqrt(gnorm_sq);
        }

        sol.trace.push_back({k, lambda.v, ev.value, gnorm_inf, step});
        sol.iterations = k + 1;

        if (gnorm_inf < params.grad_tol) {
            sol.converged = true;
            // A zero-tolerance supergradient also certifies the iterate itself.
            if (ev.value >= best) {
                sol.lambda_star = lambda;
                sol.best_eval = std::move(ev);
                sol.value = sol.best_eval.value;
            }
            break;
        }

        if (restart) {
            if (delta < 1e-13 * std::max(1.0, std::abs(best)))
                break;   // step budget exhausted below floating resolution
            // Probe again from the incumbent along the last supergradient.
            lambda = sol.lambda_star;
        }
        std::vector<double> raw(n);
        for (int i = 0; i < n; ++i) raw[i] = lambda.v[i] + step * ev.supergradient[i];
        lambda = project(raw, spec.m, box);
    }
    return sol;
}

struct Certificate {
    std::vector<double> feasibility;   // E[Psi_i] - target_i at the candidate policy
    double complementarity_gap = 0.0;  // |lambda . feasibility|
    double stationarity_gap = 0.0;     // Lagrangian(policy, lambda) - d_h(lambda)
    bool feasibility_pass = false;
    bool complementarity_pass = false;
    bool stationarity_pass = false;

    bool pass() const { return feasibility_pass && complementarity_pass && stationarity_pass; }
};

// Checks the discrete-time optimality conditions for a candidate
// (policy, lambda) pair: feasibility of the policy, complementary
// slackness, and stationarity of the policy for the lambda-Lagrangian.
inline Certificate certify(const ProblemSpec& spec, const Discretization& disc,
                           const DualPoint& lambda, const FeedbackPolicy& policy, double tol) {
    lambda.validate(spec);
    const GridDistribution dist = forward_distribution(spec, disc, policy);
    ForwardExpectations fe = forward_expectations(spec, disc, policy, dist);

    Certificate cert;
    cert.feasibility = fe.residuals;
    double pairing = 0.0;
    for (int i = 0; i < spec.n_constraints(); ++i) pairing += lambda[i] * fe.residuals[i];
    cert.complementarity_gap = std::abs(pairing);

    const double lagrangian_value = fe.cost + pairing;
    const DualEvaluation inner = solve_inner(spec, disc, lambda);
    cert.stationarity_gap = lagrangian_value - inner.value;

    cert.feasibility_pass = true;
    for (int i = 0; i < spec.m; ++i)
        if (std::abs(fe.residuals[i]) > tol) cert.feasibility_pass = false;
    for (int i = spec.m; i < spec.n_constraints(); ++i)
        if (fe.residuals[i] > tol) cert.feasibility_pass = false;
    cert.complementarity_pass = cert.complementarity_gap <= tol;
    cert.stationarity_pass = cert.stationarity_gap <= tol;
    return cert;
}

} // namespace ccs
