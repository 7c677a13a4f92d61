#include "ccs/commands.hpp"
#include "ccs/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace ccs;

namespace {

RunConfig parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

} // namespace

TEST_CASE("config parsing") {
    SECTION("minimal builtin config") {
        RunConfig c = parse_str("[problem]\nbuiltin = example1\n[disc]\nh = 1e-3\n");
        CHECK(c.builtin == "example1");
        REQUIRE(c.h.has_value());
        CHECK(*c.h == 1e-3);
        CHECK(c.kernel == "exact");
        CHECK(c.step == "auto");
    }

    SECTION("family with constraints, order normalized") {
        RunConfig c = parse_str(
            "[problem]\nfamily = lq\nsigma = 1\naT = 2\n"
            "[problem.constraint1]\nkind = inequality\nmap = quadratic\nc0 = -0.5\nc2 = 1\n"
            "[problem.constraint2]\nkind = equality\nmap = linear\nc0 = 1\nc1 = -1\n"
            "[disc]\nh = 0.01\n");
        ResolvedProblem p = resolve_problem(c);
        CHECK(p.spec.m == 1);
        CHECK(p.spec.l == 1);
        CHECK(p.spec.constraints[0].kind == ConstraintKind::equality);
        CHECK(p.spec.constraints[0].terminal_map(0.0) == 1.0);
        CHECK(p.spec.constraints[1].terminal_map(2.0) == Catch::Approx(3.5));
    }

    SECTION("unknown key rejected with its line number") {
        try {
            parse_str("[problem]\nbuiltin = example1\nbogus = 1\n[disc]\nh = 1e-3\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 3);
        }
    }

    SECTION("unknown section rejected") {
        CHECK_THROWS_AS(parse_str("[nope]\nx = 1\n"), ConfigError);
    }

    SECTION("malformed lines carry line numbers") {
        try {
            parse_str("[problem]\nbuiltin = example1\n[disc]\nh 1e-3\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 4);
        }
    }

    SECTION("bad numbers rejected") {
        CHECK_THROWS_AS(parse_str("[problem]\nbuiltin = example1\n[disc]\nh = abc\n"), ConfigError);
    }

    SECTION("builtin and family are mutually exclusive") {
        CHECK_THROWS_AS(parse_str("[problem]\nbuiltin = example1\nfamily = lq\n[disc]\nh = 1e-3\n"),
                        ConfigError);
    }

    SECTION("h is demanded by the command, not the parser") {
        RunConfig c = parse_str("[problem]\nbuiltin = example1\n");
        CHECK_FALSE(c.h.has_value());
        std::ostringstream log;
        CHECK_THROWS_AS(cmd_solve(c, log), ConfigError);   // solve needs h
    }

    SECTION("auto markers") {
        RunConfig c = parse_str(
            "[problem]\nbuiltin = example1\n[disc]\nh = 1e-3\ndx = auto\n[dual]\nM = auto\neps = 0.5\n");
        CHECK_FALSE(c.dx.has_value());
        CHECK_FALSE(c.M.has_value());
        REQUIRE(c.eps.has_value());
        CHECK(*c.eps == 0.5);
    }
}

TEST_CASE("config echo round-trips to an identical RunConfig") {
    const std::string text =
        "[problem]\nfamily = lq\nsigma = 0.9\naT = 2\nbT = -1\ncT = 0.25\nx0 = 0.5\nT = 2\n"
        "[problem.constraint1]\nkind = equality\nmap = linear\nc0 = 1\nc1 = -1\ntarget = 0.125\n"
        "[disc]\nh_list = 0.01 0.005 0.002\ncfl_target = 0.2\ncontrol_min = -3\ncontrol_max = 3\n"
        "control_step = 0.25\nkernel = exact\n"
        "[dual]\nstep = polyak\ngrad_tol = 1e-5\nmax_iters = 77\n"
        "[mc]\nn_paths = 12345\nseed = 99\n"
        "[outputs]\ndir = somewhere\nwrite_trace = false\n";
    RunConfig c = parse_str(text);
    std::ostringstream echo;
    write_config_echo(echo, c);
    RunConfig c2 = parse_str(echo.str());
    CHECK(c == c2);

    // And the echo of the echo is byte-identical.
    std::ostringstream echo2;
    write_config_echo(echo2, c2);
    CHECK(echo.str() == echo2.str());
}

TEST_CASE("problem resolution errors") {
    SECTION("unknown builtin") {
        RunConfig c = parse_str("[problem]\nbuiltin = nope\n[disc]\nh = 1e-3\n");
        CHECK_THROWS_AS(resolve_problem(c), ConfigError);
    }
    SECTION("constraints forbidden for builtins") {
        RunConfig c = parse_str(
            "[problem]\nbuiltin = example1\n[problem.constraint1]\nkind = equality\n[disc]\nh = 1e-3\n");
        CHECK_THROWS_AS(resolve_problem(c), ConfigError);
    }
    SECTION("unknown family") {
        RunConfig c = parse_str("[problem]\nfamily = nope\n[disc]\nh = 1e-3\n");
        CHECK_THROWS_AS(resolve_problem(c), ConfigError);
    }
}
