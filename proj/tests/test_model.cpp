#include "ccs/builtins.hpp"
#include "ccs/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace ccs;

TEST_CASE("lagrangian terminal payoff") {
    BuiltinProblem ex1 = make_example1();

    SECTION("lambda = 0 reduces to the terminal cost") {
        DualPoint zero = DualPoint::zeros(1);
        for (double x : {-2.0, 0.0, 0.7, 3.0})
            CHECK(lagrangian_terminal(x, zero, ex1.spec) == x * x);
    }

    SECTION("direct substitution, example 1") {
        DualPoint lam(std::vector<double>{3.0});
        CHECK(lagrangian_terminal(1.0, lam, ex1.spec) == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("direct substitution, example 2") {
        BuiltinProblem ex2 = make_example2();
        DualPoint lam(std::vector<double>{2.0});
        CHECK(lagrangian_terminal(0.0, lam, ex2.spec) == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("affine in lambda at fixed x") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int rep = 0; rep < 50; ++rep) {
            const double x = u(rng);
            const double l1 = u(rng), l2 = u(rng), th = 0.25 * (rep % 5);
            DualPoint a(std::vector<double>{l1}), b(std::vector<double>{l2});
            DualPoint mix(std::vector<double>{th * l1 + (1 - th) * l2});
            const double lhs = lagrangian_terminal(x, mix, ex1.spec);
            const double rhs = th * lagrangian_terminal(x, a, ex1.spec) +
                               (1 - th) * lagrangian_terminal(x, b, ex1.spec);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }

    SECTION("targets shift the payoff") {
        BuiltinProblem b = make_example1();
        b.spec.constraints[0].target = 0.5;
        DualPoint lam(std::vector<double>{2.0});
        // x^2 + 2 ((-x + 1) - 0.5)
        CHECK(lagrangian_terminal(1.0, lam, b.spec) == Catch::Approx(1.0 + 2.0 * (-0.5)).margin(1e-15));
    }

    SECTION("path-only constraint rejected") {
        ProblemSpec s = ex1.spec;
        s.constraints[0].terminal_map = nullptr;
        s.constraints[0].path_map = [](const std::vector<double>&, const std::vector<double>& x) {
            return x.back();
        };
        DualPoint lam(std::vector<double>{1.0});
        CHECK_THROWS_WITH(lagrangian_terminal(0.0, lam, s),
                          Catch::Matchers::ContainsSubstring("not DP-compatible"));
    }
}

TEST_CASE("problem spec validation") {
    BuiltinProblem b = make_example1();
    SECTION("valid") { CHECK_NOTHROW(b.spec.validate()); }
    SECTION("constraint count mismatch") {
        b.spec.m = 2;
        CHECK_THROWS_AS(b.spec.validate(), std::invalid_argument);
    }
    SECTION("ordering enforced") {
        b.spec.constraints[0].kind = ConstraintKind::inequality;
        CHECK_THROWS_AS(b.spec.validate(), std::invalid_argument);
    }
}

TEST_CASE("control set") {
    CHECK_THROWS_AS(ControlSet(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(ControlSet(std::vector<double>{1.0, 1.0}), std::invalid_argument);
    ControlSet grid = ControlSet::uniform(-6.0, 6.0, 0.5);
    CHECK(grid.size() == 25);
    CHECK(grid.values.front() == -6.0);
    CHECK(grid.values.back() == Catch::Approx(6.0));
}

TEST_CASE("dual point sign constraint") {
    BuiltinProblem ex2 = make_example2();
    DualPoint bad(std::vector<double>{-1.0});
    CHECK_THROWS_AS(bad.validate(ex2.spec), std::invalid_argument);
    DualPoint good(std::vector<double>{1.0});
    CHECK_NOTHROW(good.validate(ex2.spec));
}
