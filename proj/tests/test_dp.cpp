#include "ccs/builtins.hpp"
#include "ccs/dp.hpp"
#include "ccs/qualify.hpp"

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace ccs;
using ccstest::make_tiny_instance;

namespace {

ProblemSpec free_spec(double mu_scale, double sigma, TerminalFn phi) {
    ProblemSpec s;
    s.drift = [mu_scale](double, double, double a) { return mu_scale * a; };
    s.diffusion = [sigma](double, double, double) { return sigma; };
    s.running_cost = [](double, double, double) { return 0.0; };
    s.terminal_cost = std::move(phi);
    s.x0 = 0.0;
    return s;
}

} // namespace

TEST_CASE("backward induction basics") {
    SECTION("constant terminal value is a fixed point") {
        auto spec = free_spec(1.0, 1.0, [](double) { return 4.25; });
        auto disc = Discretization::make(1.0, 20, std::sqrt(0.05 / 0.1), 0.0, -4.0, 4.0,
                                         ControlSet({-1.0, 0.0, 1.0}));
        DualEvaluation ev = solve_inner(spec, disc, DualPoint::zeros(0));
        CHECK(ev.value == Catch::Approx(4.25).margin(1e-12));
        CHECK(ev.cost_expectation == Catch::Approx(4.25).margin(1e-12));
    }

    SECTION("N=1, two controls: matches hand enumeration") {
        ProblemSpec spec;
        spec.drift = [](double, double, double a) { return a; };
        spec.diffusion = [](double, double, double) { return 0.8; };
        spec.running_cost = [](double, double, double a) { return 0.3 * a * a; };
        spec.terminal_cost = [](double x) { return (x - 0.5) * (x - 0.5); };
        spec.x0 = 0.0;
        const double dx = 0.5, h = 0.2;
        auto disc = Discretization::make(h, 1, dx, 0.0, -2.0 - 1e-9, 2.0 + 1e-9,
                                         ControlSet({-1.0, 1.0}));
        DualEvaluation ev = solve_inner(spec, disc, DualPoint::zeros(0));

        // Oracle: enumerate both one-step laws directly.
        double best = 1e300;
        for (double a : {-1.0, 1.0}) {
            const double diff = 0.5 * 0.64 * h / (dx * dx);
            const double pu = (a > 0 ? a * h / dx : 0.0) + diff;
            const double pd = (a < 0 ? -a * h / dx : 0.0) + diff;
            const double ps = 1.0 - pu - pd;
            double v = 0.3 * a * a * h;
            v += pu * spec.terminal_cost(dx) + ps * spec.terminal_cost(0.0) +
                 pd * spec.terminal_cost(-dx);
            best = std::min(best, v);
        }
        CHECK(ev.value == Catch::Approx(best).margin(1e-14));
    }

    SECTION("argmin ties break to the lowest control index") {
        // Symmetric problem: controls +-1 give identical values at x = 0.
        auto spec = free_spec(1.0, 1.0, [](double x) { return x * x; });
        auto disc = Discretization::make(0.1, 1, 0.5, 0.0, -2.0 - 1e-9, 2.0 + 1e-9,
                                         ControlSet({-1.0, 1.0}));
        DualEvaluation ev = solve_inner(spec, disc, DualPoint::zeros(0));
        CHECK(ev.policy.action[0][disc.j0] == 0);
    }
}

TEST_CASE("forward distribution") {
    SECTION("deterministic chain keeps a point mass") {
        auto spec = free_spec(0.0, 0.0, [](double x) { return x; });
        auto disc = Discretization::make(1.0, 5, 0.5, 0.0, -2.0 - 1e-9, 2.0 + 1e-9,
                                         ControlSet({0.0, 1.0}));
        FeedbackPolicy pol;
        pol.N = disc.N;
        pol.J = disc.J;
        pol.action.assign(disc.N, std::vector<int>(disc.J + 1, 1));
        GridDistribution dist = forward_distribution(spec, disc, pol);
        for (int k = 0; k <= disc.N; ++k) {
            CHECK(dist.mass[k][disc.j0] == 1.0);
        }
    }

    SECTION("one-step pushforward of the (0.05, 0.05, 0.9) triple") {
        auto spec = free_spec(0.0, 1.0, [](double x) { return x; });
        const double h = 1e-3, dx = std::sqrt(h / 0.1);
        auto disc = Discretization::make(h, 1, dx, 0.0, -3.0 * dx - 1e-9, 3.0 * dx + 1e-9,
                                         ControlSet({0.0}));
        FeedbackPolicy pol;
        pol.N = 1;
        pol.J = disc.J;
        pol.action.assign(1, std::vector<int>(disc.J + 1, 0));
        GridDistribution dist = forward_distribution(spec, disc, pol);
        CHECK(dist.mass[1][disc.j0 + 1] == Catch::Approx(0.05).margin(1e-15));
        CHECK(dist.mass[1][disc.j0] == Catch::Approx(0.9).margin(1e-15));
        CHECK(dist.mass[1][disc.j0 - 1] == Catch::Approx(0.05).margin(1e-15));
    }

    SECTION("mass conserved on random instances") {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 10; ++rep) {
            auto ti = make_tiny_instance(rng, 1, 0);
            DualEvaluation ev = solve_inner(ti.spec, ti.disc, DualPoint::zeros(1));
            GridDistribution dist = forward_distribution(ti.spec, ti.disc, ev.policy);
            for (int k = 0; k <= ti.disc.N; ++k) {
                double total = 0.0;
                for (double m : dist.mass[k]) {
                    total += m;
                    CHECK(m >= 0.0);
                }
                CHECK(total == Catch::Approx(1.0).margin(1e-10));
            }
        }
    }
}

TEST_CASE("backward/forward consistency identity") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        auto ti = make_tiny_instance(rng, 1, 1);
        DualPoint lam(std::vector<double>{u(rng), std::abs(u(rng))});
        DualEvaluation ev = solve_inner(ti.spec, ti.disc, lam);
        double pairing = 0.0;
        for (int i = 0; i < 2; ++i) pairing += lam[i] * ev.supergradient[i];
        CHECK(ev.value == Catch::Approx(ev.cost_expectation + pairing).margin(1e-8));
    }
}

TEST_CASE("scheme monotonicity in the terminal data") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        auto ti = make_tiny_instance(rng, 0, 0);
        ValueTable base, raised;
        solve_inner(ti.spec, ti.disc, DualPoint::zeros(0), &base);
        const double bump = 0.1 + u(rng);
        ProblemSpec spec2 = ti.spec;
        TerminalFn phi = ti.spec.terminal_cost;
        spec2.terminal_cost = [phi, bump](double x) { return phi(x) + bump; };
        solve_inner(spec2, ti.disc, DualPoint::zeros(0), &raised);
        for (int k = 0; k <= ti.disc.N; ++k)
            for (int j = 0; j <= ti.disc.J; ++j)
                CHECK(raised.values[k][j] >= base.values[k][j] - 1e-12);
    }
}

TEST_CASE("lambda -> d_h(lambda) is concave with supergradients") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int rep = 0; rep < 8; ++rep) {
        auto ti = make_tiny_instance(rng, 1, 1);
        auto dual_at = [&](const DualPoint& lam) { return solve_inner(ti.spec, ti.disc, lam); };
        for (int trial = 0; trial < 12; ++trial) {
            DualPoint l1(std::vector<double>{u(rng), std::abs(u(rng))});
            DualPoint l2(std::vector<double>{u(rng), std::abs(u(rng))});
            DualEvaluation e1 = dual_at(l1), e2 = dual_at(l2);

            for (double th : {0.25, 0.5, 0.75}) {
                DualPoint mix(std::vector<double>{th * l1[0] + (1 - th) * l2[0],
                                                  th * l1[1] + (1 - th) * l2[1]});
                const double dmix = dual_at(mix).value;
                CHECK(dmix >= th * e1.value + (1 - th) * e2.value - 1e-9);
            }
            // superdifferential inequality: d(l2) <= d(l1) + <g(l1), l2 - l1>
            double lin = e1.value;
            for (int i = 0; i < 2; ++i) lin += e1.supergradient[i] * (l2[i] - l1[i]);
            CHECK(e2.value <= lin + 1e-9);
        }
    }
}

TEST_CASE("primal brute force") {
    SECTION("no constraints: equals the best pure policy") {
        std::mt19937_64 rng(13);
        for (int rep = 0; rep < 5; ++rep) {
            auto ti = make_tiny_instance(rng, 0, 0);
            BruteForceResult bf = primal_bruteforce(ti.spec, ti.disc);
            DualEvaluation ev = solve_inner(ti.spec, ti.disc, DualPoint::zeros(0));
            REQUIRE(bf.feasible);
            CHECK(bf.value == Catch::Approx(ev.value).margin(1e-11));
        }
    }

    SECTION("equality binding strictly between two pure outcomes") {
        // Deterministic one-step chain: a = 0 keeps X = 0, a = 1 moves to 1.
        ProblemSpec spec;
        spec.drift = [](double, double, double a) { return a; };
        spec.diffusion = [](double, double, double) { return 0.0; };
        spec.running_cost = [](double, double, double) { return 0.0; };
        spec.terminal_cost = [](double x) { return x; };
        ConstraintFunctional c;
        c.kind = ConstraintKind::equality;
        c.terminal_map = [](double x) { return x; };
        c.target = 0.4;
        spec.constraints = {c};
        spec.m = 1;
        spec.x0 = 0.0;
        auto disc = Discretization::make(1.0, 1, 1.0, 0.0, -2.0 - 1e-9, 2.0 + 1e-9,
                                         ControlSet({0.0, 1.0}));
        BruteForceResult bf = primal_bruteforce(spec, disc);
        REQUIRE(bf.feasible);
        // Mixture weight on a=1 must be 0.4, and E[Phi] = 0.4.
        CHECK(bf.value == Catch::Approx(0.4).margin(1e-12));
    }

    SECTION("unreachable constraint reports infeasible") {
        ProblemSpec spec;
        spec.drift = [](double, double, double a) { return a; };
        spec.diffusion = [](double, double, double) { return 0.0; };
        spec.running_cost = [](double, double, double) { return 0.0; };
        spec.terminal_cost = [](double x) { return x; };
        ConstraintFunctional c;
        c.kind = ConstraintKind::equality;
        c.terminal_map = [](double x) { return x; };
        c.target = 7.0;   // max reachable is 1
        spec.constraints = {c};
        spec.m = 1;
        spec.x0 = 0.0;
        auto disc = Discretization::make(1.0, 1, 1.0, 0.0, -2.0 - 1e-9, 2.0 + 1e-9,
                                         ControlSet({0.0, 1.0}));
        BruteForceResult bf = primal_bruteforce(spec, disc);
        CHECK_FALSE(bf.feasible);
        CHECK(std::isinf(bf.value));
    }

    SECTION("size preconditions enforced") {
        BuiltinProblem ex1 = make_example1();
        auto disc = Discretization::make(1.0, 100, std::sqrt(0.01 / 0.1), 0.0, -12.0, 12.0,
                                         ControlSet::uniform(-6.0, 6.0, 0.5));
        CHECK_THROWS_AS(primal_bruteforce(ex1.spec, disc), std::invalid_argument);
    }
}

TEST_CASE("primal value is Lipschitz in the constraint targets") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int done = 0;
    for (int rep = 0; rep < 40 && done < 8; ++rep) {
        auto ti = make_tiny_instance(rng, 1, 0);
        QualificationReport q = check_qualification(ti.spec, ti.disc, 1e-4);
        if (!q.pass) continue;
        BruteForceResult base = primal_bruteforce(ti.spec, ti.disc);
        if (!base.feasible) continue;
        // measured constants: M over pure-policy outcomes, eps from the margin
        double M = 0.0;
        for (const auto& oc : enumerate_policy_outcomes(ti.spec, ti.disc))
            M = std::max(M, std::abs(oc.cost));
        const double eps = q.margin;
        const double delta = 0.5 * eps * u(rng);
        ProblemSpec shifted = ti.spec;
        shifted.constraints[0].target += delta;
        BruteForceResult moved = primal_bruteforce(shifted, ti.disc);
        if (!moved.feasible) continue;
        CHECK(std::abs(moved.value - base.value) <= (4.0 * M / eps) * std::abs(delta) + 1e-8);
        ++done;
    }
    CHECK(done >= 5);
}

TEST_CASE("control-only fast path agrees with the general sweep") {
    BuiltinProblem ex1 = make_example1();
    auto disc = Discretization::make(1.0, 50, std::sqrt(0.02 / 0.1), 0.0, -8.0, 8.0,
                                     ControlSet::uniform(-4.0, 4.0, 0.5));
    DualPoint lam(std::vector<double>{2.0});
    ProblemSpec general = ex1.spec;
    general.control_only_coefficients = false;
    DualEvaluation fast = solve_inner(ex1.spec, disc, lam);
    DualEvaluation slow = solve_inner(general, disc, lam);
    CHECK(fast.value == Catch::Approx(slow.value).margin(1e-12));
    CHECK(fast.policy.action == slow.policy.action);

    SECTION("a lying flag is rejected") {
        ProblemSpec liar = ex1.spec;
        liar.drift = [](double, double x, double a) { return a + 0.1 * x; };
        liar.control_only_coefficients = true;
        CHECK_THROWS_AS(solve_inner(liar, disc, lam), std::invalid_argument);
    }
}

TEST_CASE("example 1 inner solve at the optimal multiplier") {
    // At lambda = 3 the inner value meets the continuous-time maximum
    // 3/2 + ln(3)/2 and the equality constraint is active, so E[X_T] ~ 1.
    BuiltinProblem ex1 = make_example1();
    const double h = 1e-3;
    auto disc = Discretization::make(1.0, 1000, std::sqrt(h / 0.1), 0.0, -12.0, 12.0,
                                     ControlSet::uniform(-6.0, 6.0, 0.1), KernelVariant::exact);
    DualEvaluation ev = solve_inner(ex1.spec, disc, DualPoint(std::vector<double>{3.0}));
    CHECK(ev.value == Catch::Approx(1.5 + 0.5 * std::log(3.0)).margin(5e-2));
    // supergradient = E[-X_T + 1], so |E[X_T] - 1| = |g|
    CHECK(std::abs(ev.supergradient[0]) <= 5e-2);
}

TEST_CASE("value table terminal slice equals the lagrangian payoff exactly") {
    BuiltinProblem ex1 = make_example1();
    auto disc = Discretization::make(1.0, 10, std::sqrt(0.1 / 0.1), 0.0, -6.0, 6.0,
                                     ControlSet::uniform(-2.0, 2.0, 1.0));
    DualPoint lam(std::vector<double>{1.25});
    ValueTable table;
    solve_inner(ex1.spec, disc, lam, &table);
    REQUIRE(table.N == disc.N);
    for (int j = 0; j <= disc.J; ++j)
        CHECK(table.values[disc.N][j] == lagrangian_terminal(disc.x(j), lam, ex1.spec));
}

TEST_CASE("NaN values surface as numerical failures with a location") {
    ProblemSpec spec;
    spec.drift = [](double, double, double a) { return a; };
    spec.diffusion = [](double, double, double) { return 1.0; };
    spec.running_cost = [](double, double, double) { return 0.0; };
    spec.terminal_cost = [](double x) { return x > 2.0 ? std::nan("") : x; };
    spec.x0 = 0.0;
    auto disc = Discretization::make(1.0, 4, 1.0, 0.0, -3.0 - 1e-9, 3.0 + 1e-9,
                                     ControlSet({0.0, 1.0}));
    CHECK_THROWS_AS(solve_inner(spec, disc, DualPoint::zeros(0)), NumericalFailure);
}
