// Controlled Markov chain approximation of the diffusion: a three-point
// transition kernel on a uniform time-space grid, with CFL validation.
//
// Kernel variants:
//   upwind   - drift split by sign between p_up and p_down; probabilities
//              stay in [0,1] under the widest step range, second moment is
//              sigma^2 h + |mu| h dx (the O(h^{3/2}) bias drives the observed
//              1/2 convergence rate).
//   centered - the textbook finite-difference form with the whole drift in
//              p_up; requires mu >= 0 or a fine grid.
//   exact    - both increments loaded so that mean = mu h and variance =
//              sigma^2 h hold exactly; the tightest CFL restriction.
#pragma once

#include "ccs/errors.hpp"
#include "ccs/model.hpp"

#include <cmath>
#include <vector>

namespace ccs {

enum class KernelVariant { upwind, centered, exact };

inline const char* kernel_variant_name(KernelVariant v) {
    switch (v) {
        case KernelVariant::upwind: return "upwind";
        case KernelVariant::centered: return "centered";
        default: return "exact";
    }
}

struct Discretization {
    double T = 1.0;
    int N = 1;                 // time steps; h = T / N
    double dx = 1.0;
    double x_min = -1.0, x_max = 1.0;
    int j0 = 0;                // grid index of x0
    int J = 0;                 // highest grid index; nodes j = 0..J
    ControlSet controls;
    KernelVariant kernel = KernelVariant::upwind;

    double h() const { return T / N; }
    double x(int j) const { return x_min + j * dx; }
    double t(int k) const { return k * h(); }
    int n_nodes() const { return J + 1; }

    // Aligns the grid on x0 so that x0 is exactly a node; requested bounds
    // are rounded outward to whole steps.
    static Discretization make(double T, int N, double dx, double x0,
                               double want_min, double want_max,
                               ControlSet controls,
                               KernelVariant kernel = KernelVariant::upwind) {
        if (T <= 0 || N <= 0 || dx <= 0)
            throw std::invalid_argument("Discretization: T, N, dx must be positive");
        if (!(want_min < x0 && x0 < want_max))
            throw std::invalid_argument("Discretization: need x_min < x0 < x_max");
        Discretization d;
        d.T = T;
        d.N = N;
        d.dx = dx;
        d.controls = std::move(controls);
        d.kernel = kernel;
        const int down = static_cast<int>(std::ceil((x0 - want_min) / dx - 1e-12));
        const int up = static_cast<int>(std::ceil((want_max - x0) / dx - 1e-12));
        d.j0 = down;
        d.J = down + up;
        d.x_min = x0 - down * dx;
        d.x_max = x0 + up * dx;
        return d;
    }
};

struct KernelTriple {
    double p_up = 0.0, p_down = 0.0, p_stay = 1.0;
};

namespace detail {

inline KernelTriple kernel_from_coeffs(double mu, double sig, double h, double dx,
                                       KernelVariant variant,
                                       double t, double x, double a) {
    if (sig < 0.0)
        throw std::invalid_argument("diffusion must be nonnegative (t=" + std::to_string(t) +
                                    ", x=" + std::to_string(x) + ", a=" + std::to_string(a) + ")");
    const double diff = 0.5 * sig * sig * h / (dx * dx);
    const double adv = mu * h / dx;
    KernelTriple k;
    switch (variant) {
        case KernelVariant::upwind:
            k.p_up = (mu > 0 ? adv : 0.0) + diff;
            k.p_down = (mu < 0 ? -adv : 0.0) + diff;
            break;
        case KernelVariant::centered:
            k.p_up = adv + diff;
            k.p_down = diff;
            break;
        case KernelVariant::exact: {
            const double second = (sig * sig * h + mu * mu * h * h) / (dx * dx);
            k.p_up = 0.5 * (second + adv);
            k.p_down = 0.5 * (second - adv);
            break;
        }
    }
    k.p_stay = 1.0 - k.p_up - k.p_down;
    const double slack = 1e-12;
    if (k.p_up < -slack || k.p_up > 1 + slack) throw CflViolation(t, x, a, k.p_up, "p_up");
    if (k.p_down < -slack || k.p_down > 1 + slack) throw CflViolation(t, x, a, k.p_down, "p_down");
    if (k.p_stay < -slack || k.p_stay > 1 + slack) throw CflViolation(t, x, a, k.p_stay, "p_stay");
    k.p_up = std::min(1.0, std::max(0.0, k.p_up));
    k.p_down = std::min(1.0, std::max(0.0, k.p_down));
    k.p_stay = std::min(1.0, std::max(0.0, k.p_stay));
    return k;
}

} // namespace detail

inline KernelTriple build_kernel(const ProblemSpec& spec, const Discretization& disc,
                                 double t, double x, double a) {
    return detail::kernel_from_coeffs(spec.drift(t, x, a), spec.diffusion(t, x, a),
                                      disc.h(), disc.dx, disc.kernel, t, x, a);
}

struct ValidationReport {
    bool pass = true;
    double worst_margin = 1.0;     // min over the grid of min(p_up, p_down, p_stay)
    double cfl_max = 0.0;          // max of |mu| h/dx + sigma^2 h/dx^2
    double worst_t = 0.0, worst_x = 0.0, worst_a = 0.0;
    long n_checked = 0;
};

// Scans every (t_k, x_j, a) triple; never throws.
inline ValidationReport validate_cfl(const ProblemSpec& spec, const Discretization& disc) {
    ValidationReport rep;
    const double h = disc.h(), dx = disc.dx;
    for (int k = 0; k < disc.N; ++k) {
        const double t = disc.t(k);
        for (int j = 0; j <= disc.J; ++j) {
            const double x = disc.x(j);
            for (double a : disc.controls.values) {
                const double mu = spec.drift(t, x, a);
                const double sig = spec.diffusion(t, x, a);
                double margin;
                try {
                    KernelTriple tri = detail::kernel_from_coeffs(mu, sig, h, dx, disc.kernel, t, x, a);
                    margin = std::min(std::min(tri.p_up, tri.p_down), tri.p_stay);
                } catch (const CflViolation& v) {
                    margin = v.value < 0 ? v.value : 1.0 - v.value;
                } catch (const std::invalid_argument&) {
                    margin = -1.0;
                }
                const double load = std::abs(mu) * h / dx + sig * sig * h / (dx * dx);
                rep.cfl_max = std::max(rep.cfl_max, load);
                if (margin < rep.worst_margin) {
                    rep.worst_margin = margin;
                    rep.worst_t = t;
                    rep.worst_x = x;
                    rep.worst_a = a;
                }
                ++rep.n_checked;
            }
            // Coefficients that ignore (t, x) need a single row scan.
            if (spec.control_only_coefficients && j > 0) break;
        }
        if (spec.control_only_coefficients && k > 0) break;
    }
    rep.pass = rep.worst_margin >= 0.0;
    return rep;
}

// Single-uniform-draw realization of the increment.
inline double sample_increment(const KernelTriple& k, double u, double dx) {
    if (u < k.p_up) return dx;
    if (u < k.p_up + k.p_down) return -dx;
    return 0.0;
}

} // namespace ccs
