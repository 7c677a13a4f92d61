// Inner (unconstrained) problem: backward dynamic programming over the
// chain for d_h(lambda), argmin feedback extraction, exact forward
// propagation of the state law, and a brute-force primal oracle for tiny
// instances.
#pragma once

#include "ccs/chain.hpp"
#include "ccs/errors.hpp"
#include "ccs/model.hpp"
#include "ccs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace ccs {

struct ValueTable {
    int N = 0, J = 0;
    std::vector<std::vector<double>> values;  // values[k][j], k = 0..N
};

struct FeedbackPolicy {
    int N = 0, J = 0;
    std::vector<std::vector<int>> action;     // action[k][j], k = 0..N-1

    bool shaped_for(const Discretization& d) const {
        return N == d.N && J == d.J;
    }
};

struct GridDistribution {
    std::vector<std::vector<double>> mass;    // mass[k][j], k = 0..N
};

struct DualEvaluation {
    double value = 0.0;                       // d_h(lambda)
    std::vector<double> supergradient;        // E[Psi_i] - target_i under the argmin policy
    FeedbackPolicy policy;
    double cost_expectation = 0.0;            // E[sum L h + Phi0], no penalty term
};

// Pushes the point mass at x0 through the chain under a fixed policy.
inline GridDistribution forward_distribution(const ProblemSpec& spec, const Discretization& disc,
                                             const FeedbackPolicy& policy) {
    if (!policy.shaped_for(disc))
        throw std::invalid_argument("forward_distribution: policy not shaped for discretization");
    const int N = disc.N, J = disc.J;
    GridDistribution dist;
    dist.mass.assign(N + 1, std::vector<double>(J + 1, 0.0));
    dist.mass[0][disc.j0] = 1.0;
    for (int k = 0; k < N; ++k) {
        const double t = disc.t(k);
        auto& cur = dist.mass[k];
        auto& nxt = dist.mass[k + 1];
        for (int j = 0; j <= J; ++j) {
            const double m = cur[j];
            if (m == 0.0) continue;
            const double a = disc.controls.values[policy.action[k][j]];
            const KernelTriple tri = build_kernel(spec, disc, t, disc.x(j), a);
            nxt[std::min(j + 1, J)] += m * tri.p_up;   // reflecting truncation
            nxt[j] += m * tri.p_stay;
            nxt[std::max(j - 1, 0)] += m * tri.p_down;
        }
        double total = 0.0;
        for (int j = 0; j <= J; ++j) total += nxt[j];
        if (std::abs(total - 1.0) > 1e-10)
            throw NumericalFailure("mass leak " + std::to_string(total - 1.0), k + 1, -1);
    }
    return dist;
}

struct ForwardExpectations {
    double cost = 0.0;                        // E[sum_k L h + Phi0(X_N)]
    std::vector<double> residuals;            // E[Psi_i(X_N)] - target_i
};

inline ForwardExpectations forward_expectations(const ProblemSpec& spec, const Discretization& disc,
                                                const FeedbackPolicy& policy,
                                                const GridDistribution& dist) {
    ForwardExpectations out;
    const int N = disc.N, J = disc.J;
    double running = 0.0;
    const double h = disc.h();
    for (int k = 0; k < N; ++k) {
        const double t = disc.t(k);
        double slice = 0.0;
        for (int j = 0; j <= J; ++j) {
            const double m = dist.mass[k][j];
            if (m == 0.0) continue;
            slice += m * spec.running_cost(t, disc.x(j), disc.controls.values[policy.action[k][j]]);
        }
        running += slice * h;
    }
    double terminal = 0.0;
    for (int j = 0; j <= J; ++j) {
        const double m = dist.mass[N][j];
        if (m == 0.0) continue;
        terminal += m * spec.terminal_cost(disc.x(j));
    }
    out.cost = running + terminal;
    out.residuals.assign(spec.n_constraints(), 0.0);
    for (int i = 0; i < spec.n_constraints(); ++i) {
        const auto& c = spec.constraints[i];
        if (!c.dp_compatible())
            throw std::invalid_argument("path-dependent constraint not DP-compatible");
        double e = 0.0;
        for (int j = 0; j <= J; ++j) {
            const double m = dist.mass[N][j];
            if (m == 0.0) continue;
            e += m * c.terminal_map(disc.x(j));
        }
        out.residuals[i] = e - c.target;
    }
    return out;
}

// Backward induction for d_h(lambda). Ties in the control argmin break to
// the lowest index. Optionally exposes the full value table.
inline DualEvaluation solve_inner(const ProblemSpec& spec, const Discretization& disc,
                                  const DualPoint& lambda, ValueTable* table_out = nullptr) {
    lambda.validate(spec);
    const int N = disc.N, J = disc.J, nA = disc.controls.size();
    const double h = disc.h();

    std::vector<double> next(J + 1), cur(J + 1);
    FeedbackPolicy policy;
    policy.N = N;
    policy.J = J;
    policy.action.assign(N, std::vector<int>(J + 1, 0));
    if (table_out) {
        table_out->N = N;
        table_out->J = J;
        table_out->values.assign(N + 1, std::vector<double>(J + 1, 0.0));
    }

    for (int j = 0; j <= J; ++j) {
        next[j] = lagrangian_terminal(disc.x(j), lambda, spec);
        if (std::isnan(next[j])) throw NumericalFailure("NaN terminal value", N, j);
    }
    if (table_out) table_out->values[N] = next;

    // Coefficients that ignore (t, x) admit one kernel triple per control.
    std::vector<double> pu(nA), pd(nA), ps(nA), lh(nA);
    if (spec.control_only_coefficients) {
        const double x0 = disc.x(disc.j0);
        for (int ai = 0; ai < nA; ++ai) {
            const double a = disc.controls.values[ai];
            const KernelTriple tri = build_kernel(spec, disc, 0.0, x0, a);
            pu[ai] = tri.p_up;
            pd[ai] = tri.p_down;
            ps[ai] = tri.p_stay;
            lh[ai] = spec.running_cost(0.0, x0, a) * h;
            // Spot-check the hint: a lying flag would silently corrupt the sweep.
            for (const auto& [tp, xp] : {std::pair{disc.t(N - 1), disc.x(0)},
                                         std::pair{0.0, disc.x(J)}}) {
                if (spec.drift(tp, xp, a) != spec.drift(0.0, x0, a) ||
                    spec.diffusion(tp, xp, a) != spec.diffusion(0.0, x0, a) ||
                    spec.running_cost(tp, xp, a) != spec.running_cost(0.0, x0, a))
                    throw std::invalid_argument(
                        "control_only_coefficients set but coefficients vary with (t, x)");
            }
        }
    }

    for (int k = N - 1; k >= 0; --k) {
        const double t = disc.t(k);
        auto* act = policy.action[k].data();
        const double* vn = next.data();
        auto sweep = [&](std::ptrdiff_t j) {
            const int jp = std::min<int>(static_cast<int>(j) + 1, J);
            const int jm = std::max<int>(static_cast<int>(j) - 1, 0);
            const double vup = vn[jp], vst = vn[j], vdn = vn[jm];
            double best = std::numeric_limits<double>::infinity();
            int best_a = 0;
            if (spec.control_only_coefficients) {
                for (int ai = 0; ai < nA; ++ai) {
                    const double v = lh[ai] + pu[ai] * vup + ps[ai] * vst + pd[ai] * vdn;
                    if (v < best) { best = v; best_a = ai; }
                }
            } else {
                const double x = disc.x(static_cast<int>(j));
                for (int ai = 0; ai < nA; ++ai) {
                    const double a = disc.controls.values[ai];
                    const KernelTriple tri = build_kernel(spec, disc, t, x, a);
                    const double v = spec.running_cost(t, x, a) * h +
                                     tri.p_up * vup + tri.p_stay * vst + tri.p_down * vdn;
                    if (v < best) { best = v; best_a = ai; }
                }
            }
            if (std::isnan(best)) throw NumericalFailure("NaN value", k, static_cast<int>(j));
            cur[j] = best;
            act[j] = best_a;
        };
        // Worker spawn costs ~100us per slice; only split very wide slices.
        if (thread_count() > 1 && static_cast<long>(J) * nA >= 400000)
            parallel_for(0, J + 1, sweep);
        else
            for (int j = 0; j <= J; ++j) sweep(j);
        std::swap(cur, next);
        if (table_out) table_out->values[k] = next;
    }

    DualEvaluation out;
    out.value = next[disc.j0];
    out.policy = std::move(policy);
    const GridDistribution dist = forward_distribution(spec, disc, out.policy);
    ForwardExpectations fe = forward_expectations(spec, disc, out.policy, dist);
    out.cost_expectation = fe.cost;
    out.supergradient = std::move(fe.residuals);
    return out;
}

// --- brute-force primal oracle (tiny instances only) ---------------------

struct BruteForceResult {
    bool feasible = false;
    double value = std::numeric_limits<double>::infinity();
};

namespace detail {

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_square(std::vector<std::vector<double>> A, std::vector<double> b,
                         std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-12) return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (int r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            for (int cc = c; cc < n; ++cc) A[r][cc] -= f * A[c][cc];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int cc = r + 1; cc < n; ++cc) s -= A[r][cc] * x[cc];
        x[r] = s / A[r][r];
    }
    return true;
}

} // namespace detail

// Outcome vector of one deterministic feedback policy.
struct PolicyOutcome {
    double cost = 0.0;
    std::vector<double> residuals;
};

// Enumerates every reachability-distinct deterministic feedback policy and
// records its expectation vector.
inline std::vector<PolicyOutcome> enumerate_policy_outcomes(const ProblemSpec& spec,
                                                            const Discretization& disc) {
    const int N = disc.N, J = disc.J, nA = disc.controls.size();
    // Reachable node sets per step: start at j0, widen by one cell per step.
    std::vector<std::pair<int, int>> reach(N);  // [lo, hi] at step k
    {
        int lo = disc.j0, hi = disc.j0;
        for (int k = 0; k < N; ++k) {
            reach[k] = {lo, hi};
            lo = std::max(lo - 1, 0);
            hi = std::min(hi + 1, J);
        }
    }
    std::vector<int> node_count(N);
    long total = 1;
    for (int k = 0; k < N; ++k) {
        node_count[k] = reach[k].second - reach[k].first + 1;
        for (int c = 0; c < node_count[k]; ++c) total *= nA;
    }
    std::vector<PolicyOutcome> outcomes;
    outcomes.reserve(total);
    FeedbackPolicy policy;
    policy.N = N;
    policy.J = J;
    policy.action.assign(N, std::vector<int>(J + 1, 0));
    for (long code = 0; code < total; ++code) {
        long rest = code;
        for (int k = 0; k < N; ++k)
            for (int j = reach[k].first; j <= reach[k].second; ++j) {
                policy.action[k][j] = static_cast<int>(rest % nA);
                rest /= nA;
            }
        const GridDistribution dist = forward_distribution(spec, disc, policy);
        ForwardExpectations fe = forward_expectations(spec, disc, policy, dist);
        outcomes.push_back({fe.cost, std::move(fe.residuals)});
    }
    return outcomes;
}

// Exact weak (relaxed) primal value on a tiny instance: minimizes expected
// cost over convex mixtures of deterministic feedback policies subject to
// the constraints. Every vertex of the mixture LP has support at most
// m + l + 1, so supports and active constraint rows are enumerated
// exhaustively.
inline BruteForceResult primal_bruteforce(const ProblemSpec& spec, const Discretization& disc) {
    spec.validate();
    if (disc.N > 2 || disc.J > 9 || disc.controls.size() > 3 || spec.n_constraints() > 2)
        throw std::invalid_argument("primal_bruteforce: instance exceeds tiny-size preconditions");

    const auto outcomes = enumerate_policy_outcomes(spec, disc);
    const int P = static_cast<int>(outcomes.size());
    const int q = spec.n_constraints();
    const double tol = 1e-9;

    BruteForceResult best;
    auto feasible_value = [&](const std::vector<int>& support, const std::vector<double>& w) {
        double cost = 0.0;
        std::vector<double> r(q, 0.0);
        for (std::size_t s = 0; s < support.size(); ++s) {
            cost += w[s] * outcomes[support[s]].cost;
            for (int i = 0; i < q; ++i) r[i] += w[s] * outcomes[support[s]].residuals[i];
        }
        for (int i = 0; i < spec.m; ++i)
            if (std::abs(r[i]) > tol) return;
        for (int i = spec.m; i < q; ++i)
            if (r[i] > tol) return;
        if (cost < best.value) {
            best.value = cost;
            best.feasible = true;
        }
    };

    // Pure policies.
    for (int p = 0; p < P; ++p) feasible_value({p}, {1.0});

    // Two-point mixtures with one active constraint row.
    for (int p = 0; p < P; ++p)
        for (int pq = p + 1; pq < P; ++pq)
            for (int row = 0; row < q; ++row) {
                std::vector<std::vector<double>> A = {
                    {1.0, 1.0},
                    {outcomes[p].residuals[row], outcomes[pq].residuals[row]}};
                std::vector<double> w;
                if (!detail::solve_square(A, {1.0, 0.0}, w)) continue;
                if (w[0] < -tol || w[1] < -tol) continue;
                feasible_value({p, pq}, w);
            }

    // Three-point mixtures with two active constraint rows.
    if (q == 2) {
        for (int p = 0; p < P; ++p)
            for (int p2 = p + 1; p2 < P; ++p2)
                for (int p3 = p2 + 1; p3 < P; ++p3) {
                    std::vector<std::vector<double>> A = {
                        {1.0, 1.0, 1.0},
                        {outcomes[p].residuals[0], outcomes[p2].residuals[0], outcomes[p3].residuals[0]},
                        {outcomes[p].residuals[1], outcomes[p2].residuals[1], outcomes[p3].residuals[1]}};
                    std::vector<double> w;
                    if (!detail::solve_square(A, {1.0, 0.0, 0.0}, w)) continue;
                    if (w[0] < -tol || w[1] < -tol || w[2] < -tol) continue;
                    feasible_value({p, p2, p3}, w);
                }
    }
    return best;
}

} // namespace ccs
