// Closed-form linear-quadratic references: scalar state, unit diffusion,
// running cost a^2/2, terminal cost a_T x^2 / 2 + b_T x + c_T. The value
// over horizon T is a_0 x0^2 / 2 + b_0 x0 + c_0 with the backward map
// below; it degenerates to -infinity once 1 + T a_T <= 0.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace ccs {

struct RiccatiCoeffs {
    double a = 0.0, b = 0.0, c = 0.0;
};

inline std::optional<RiccatiCoeffs> riccati_backward(double T, const RiccatiCoeffs& at_T) {
    if (T <= 0) throw std::invalid_argument("riccati_backward: T must be positive");
    const double den = 1.0 + T * at_T.a;
    if (den <= 0.0) return std::nullopt;   // value function is -infinity
    RiccatiCoeffs at_0;
    at_0.a = at_T.a / den;
    at_0.b = at_T.b / den;
    at_0.c = at_T.c - T * at_T.b * at_T.b / (2.0 * den) + 0.5 * std::log(den);
    return at_0;
}

inline double riccati_value(const RiccatiCoeffs& at_0, double x0) {
    return 0.5 * at_0.a * x0 * x0 + at_0.b * x0 + at_0.c;
}

// d(lambda) = -lambda^2/6 + lambda + ln(3)/2  (quadratic terminal cost x^2,
// equality constraint E[-X_T + 1] = 0, x0 = 0, T = 1).
inline double example1_dual(double lambda) {
    return -lambda * lambda / 6.0 + lambda + 0.5 * std::log(3.0);
}

// d(lambda) = -2 lambda^2/(3+2 lambda) + lambda/2 + ln(3+2 lambda)/2 for
// lambda > -3/2, -infinity otherwise (inequality constraint
// E[(X_T-1)^2] - 1/2 <= 0). The formula blows down to -infinity as
// lambda -> -3/2, so the boundary point is treated as -infinity too.
inline double example2_dual(double lambda) {
    const double u = 3.0 + 2.0 * lambda;
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    return -2.0 * lambda * lambda / u + 0.5 * lambda + 0.5 * std::log(u);
}

// (lambda*, d(lambda*)) in closed form.
inline std::pair<double, double> analytic_maximizer(int example_id) {
    if (example_id == 1) {
        const double v = 1.5 + 0.5 * std::log(3.0);
        return {3.0, v};
    }
    if (example_id == 2) {
        // stationarity: with u = 3 + 2 lambda, u^2 - 2u - 18 = 0.
        const double lambda = -1.0 + 0.5 * std::sqrt(19.0);
        return {lambda, example2_dual(lambda)};
    }
    throw std::invalid_argument("analytic_maximizer: unknown example id");
}

} // namespace ccs
