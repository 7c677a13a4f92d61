// Monte-Carlo forward simulation of the chain under a fixed policy.
//
// Uniform draws come from a counter-based generator keyed on
// (seed, path, step): path i sees the same noise regardless of n_paths,
// worker count, or storage options, so runs are bit-reproducible and
// common-random-number comparisons across configurations are free.
#pragma once

#include "ccs/chain.hpp"
#include "ccs/dp.hpp"
#include "ccs/model.hpp"
#include "ccs/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace ccs {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform in [0,1) as a pure function of (seed, path, step).
inline double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    std::uint64_t z = splitmix64(seed ^ (path * 0xA24BAED4963EE407ULL));
    z = splitmix64(z ^ (step * 0x9FB21C651E98DF25ULL));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

} // namespace rng

struct SimConfig {
    long n_paths = 10000;
    std::uint64_t seed = 0;
    bool store_paths = false;
};

struct SimEstimate {
    double mean = 0.0;
    double se = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;   // 95% normal interval
};

// Called once per simulated path, in path order, when store_paths is set.
using PathSink = std::function<void(long path, const std::vector<double>& t,
                                    const std::vector<double>& x)>;

inline std::vector<SimEstimate> simulate(const ProblemSpec& spec, const Discretization& disc,
                                         const FeedbackPolicy& policy,
                                         const std::vector<PathFn>& functionals,
                                         const SimConfig& config,
                                         const PathSink& sink = nullptr) {
    if (!policy.shaped_for(disc))
        throw std::invalid_argument("simulate: policy not shaped for discretization");
    if (config.n_paths < 1)
        throw std::invalid_argument("simulate: n_paths must be >= 1");

    const int N = disc.N, J = disc.J;
    const std::size_t nf = functionals.size();
    std::vector<double> times(N + 1);
    for (int k = 0; k <= N; ++k) times[k] = disc.t(k);

    // One triple per control when the coefficients ignore (t, x).
    std::vector<KernelTriple> per_control;
    if (spec.control_only_coefficients) {
        per_control.reserve(disc.controls.size());
        for (double a : disc.controls.values)
            per_control.push_back(build_kernel(spec, disc, 0.0, disc.x(disc.j0), a));
    }

    const long block_size = 4096;
    const long n_blocks = (config.n_paths + block_size - 1) / block_size;
    std::vector<std::vector<double>> block_sum(n_blocks, std::vector<double>(nf, 0.0));
    std::vector<std::vector<double>> block_sumsq(n_blocks, std::vector<double>(nf, 0.0));

    auto run_block = [&](std::ptrdiff_t b) {
        std::vector<double> xs(N + 1);
        auto& sum = block_sum[b];
        auto& sumsq = block_sumsq[b];
        const long lo = b * block_size;
        const long hi = std::min(lo + block_size, config.n_paths);
        for (long i = lo; i < hi; ++i) {
            int j = disc.j0;
            xs[0] = disc.x(j);
            for (int k = 0; k < N; ++k) {
                const int ai = policy.action[k][j];
                const KernelTriple tri =
                    spec.control_only_coefficients
                        ? per_control[ai]
                        : build_kernel(spec, disc, times[k], disc.x(j), disc.controls.values[ai]);
                const double u = rng::counter_uniform(config.seed, static_cast<std::uint64_t>(i),
                                                      static_cast<std::uint64_t>(k));
                const double inc = sample_increment(tri, u, disc.dx);
                if (inc > 0)
                    j = std::min(j + 1, J);
                else if (inc < 0)
                    j = std::max(j - 1, 0);
                xs[k + 1] = disc.x(j);
            }
            for (std::size_t f = 0; f < nf; ++f) {
                const double v = functionals[f](times, xs);
                sum[f] += v;
                sumsq[f] += v * v;
            }
            if (config.store_paths && sink) sink(i, times, xs);
        }
    };

    if (config.store_paths && sink) {
        for (long b = 0; b < n_blocks; ++b) run_block(b);   // keep path order
    } else {
        parallel_for(0, n_blocks, run_block);
    }

    // Merge in block order so the totals are independent of scheduling.
    std::vector<SimEstimate> out(nf);
    const double n = static_cast<double>(config.n_paths);
    for (std::size_t f = 0; f < nf; ++f) {
        double s = 0.0, ss = 0.0;
        for (long b = 0; b < n_blocks; ++b) {
            s += block_sum[b][f];
            ss += block_sumsq[b][f];
        }
        const double mean = s / n;
        double var = 0.0;
        if (config.n_paths > 1) var = std::max(0.0, (ss - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        out[f] = {mean, se, mean - 1.959963984540054 * se, mean + 1.959963984540054 * se};
    }
    return out;
}

// Wraps a terminal-state map as a path functional.
inline PathFn terminal_functional(TerminalFn f) {
    return [f = std::move(f)](const std::vector<double>&, const std::vector<double>& x) {
        return f(x.back());
    };
}

} // namespace ccs
