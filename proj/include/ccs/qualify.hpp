// Robinson qualification check through the minimax reformulation: for each
// sign vector e in {-1,1}^m x {1}^l, the value
//     v_e = max_{theta in simplex} inf_gamma E[ theta . e (Psi - z) ]
// must be <= -eps. The inner infimum is the same backward DP as d_h with a
// zero objective; the outer maximization is projected supergradient ascent
// on the simplex.
#pragma once

#include "ccs/dp.hpp"
#include "ccs/dual.hpp"
#include "ccs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ccs {

// Euclidean projection onto {theta >= 0, sum theta = 1} (sort-based).
inline std::vector<double> project_simplex(std::vector<double> y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += sorted[i];
        const double cand = (cum - 1.0) / (i + 1);
        if (i + 1 == n || sorted[i + 1] <= cand) {
            tau = cand;
            break;
        }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        y[i] = std::max(y[i] - tau, 0.0);
        total += y[i];
    }
    // Renormalize away the last ulps so the sum is exactly 1 within 1e-12.
    if (total > 0) {
        for (int i = 0; i < n; ++i) y[i] /= total;
    } else {
        y.assign(n, 1.0 / n);
    }
    return y;
}

struct QualificationRow {
    std::vector<int> e;            // sign vector
    double value = 0.0;            // v_e
    std::vector<double> theta;     // maximizing simplex point
    int iterations = 0;
};

struct QualificationReport {
    bool pass = false;
    bool vacuous = false;          // no constraints: margin is +infinity
    double margin = 0.0;           // eps-hat = -max_e v_e
    double target_eps = 0.0;
    std::vector<QualificationRow> rows;
};

namespace detail {

// Strips objective terms so solve_inner returns inf E[ lambda . (Psi - z) ].
inline ProblemSpec constraint_only_spec(const ProblemSpec& spec) {
    ProblemSpec probe = spec;
    probe.terminal_cost = [](double) { return 0.0; };
    probe.running_cost = [](double, double, double) { return 0.0; };
    return probe;
}

} // namespace detail

inline QualificationReport check_qualification(const ProblemSpec& spec, const Discretization& disc,
                                               double target_eps, int max_iters = 200) {
    spec.validate();
    const int q = spec.n_constraints();
    QualificationReport rep;
    rep.target_eps = target_eps;
    if (q == 0) {
        rep.pass = true;
        rep.vacuous = true;
        rep.margin = std::numeric_limits<double>::infinity();
        return rep;
    }
    if (spec.m > 10)
        throw std::invalid_argument("check_qualification: 2^m sign vectors intractable for m > 10");

    const ProblemSpec probe = detail::constraint_only_spec(spec);
    double worst = -std::numeric_limits<double>::infinity();

    for (long mask = 0; mask < (1L << spec.m); ++mask) {
        QualificationRow row;
        row.e.assign(q, 1);
        for (int i = 0; i < spec.m; ++i)
            if (mask & (1L << i)) row.e[i] = -1;

        auto value_and_grad = [&](const std::vector<double>& theta, std::vector<double>& grad) {
            std::vector<double> lam(q);
            for (int i = 0; i < q; ++i) lam[i] = theta[i] * row.e[i];
            DualEvaluation ev = solve_inner(probe, disc, DualPoint(lam));
            grad.resize(q);
            for (int i = 0; i < q; ++i) grad[i] = row.e[i] * ev.supergradient[i];
            return ev.value;
        };

        std::vector<double> theta(q, 1.0 / q);
        std::vector<double> grad;
        double best = value_and_grad(theta, grad);
        row.theta = theta;
        row.iterations = 1;

        if (q > 1) {
            // Adaptive Polyak ascent with best-iterate tracking, mirroring the
            // dual module's conventions.
            double delta = 0.25 * std::max(1.0, std::abs(best));
            int stall = 0;
            std::vector<double> cur = theta;
            for (int k = 1; k < max_iters; ++k) {
                // Simplex optimality gap: max_i g_i - theta . g bounds the
                // remaining improvement from this supergradient.
                double gdot = 0.0, gmax = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < q; ++i) {
                    gdot += cur[i] * grad[i];
                    gmax = std::max(gmax, grad[i]);
                }
                if (gmax - gdot < 1e-9 * std::max(1.0, std::abs(best))) break;

                double gsq = 0.0;
                for (double g : grad) gsq += g * g;
                if (gsq == 0.0) break;
                const double step = delta / gsq;
                std::vector<double> next(q);
                for (int i = 0; i < q; ++i) next[i] = cur[i] + step * grad[i];
                cur = project_simplex(std::move(next));
                const double v = value_and_grad(cur, grad);
                ++row.iterations;
                if (v > best) {
                    best = v;
                    row.theta = cur;
                    stall = 0;
                } else if (++stall >= 8) {
                    delta *= 0.5;
                    stall = 0;
                    cur = row.theta;
                    if (delta < 1e-13 * std::max(1.0, std::abs(best))) break;
                    value_and_grad(cur, grad);
                }
            }
        }
        row.value = best;
        worst = std::max(worst, best);
        rep.rows.push_back(std::move(row));
    }
    rep.margin = -worst;
    rep.pass = rep.margin >= target_eps;
    return rep;
}

// Dual box sizing from measured data: M bounds the objective over the grid
// (terminal plus accumulated running cost), eps comes from the
// qualification margin with a floor against degenerate boxes.
inline DualBox make_dual_box(const ProblemSpec& spec, const Discretization& disc,
                             double qualification_margin) {
    double max_phi = 0.0, max_l = 0.0;
    for (int j = 0; j <= disc.J; ++j) {
        const double x = disc.x(j);
        max_phi = std::max(max_phi, std::abs(spec.terminal_cost(x)));
        for (double a : disc.controls.values) {
            max_l = std::max(max_l, std::abs(spec.running_cost(0.0, x, a)));
            max_l = std::max(max_l, std::abs(spec.running_cost(disc.T, x, a)));
        }
    }
    DualBox box;
    box.M = max_phi + disc.T * max_l;
    if (box.M <= 0) box.M = 1.0;
    box.eps = std::max(std::isfinite(qualification_margin) ? qualification_margin : 1.0, 1e-6);
    return box;
}

} // namespace ccs
