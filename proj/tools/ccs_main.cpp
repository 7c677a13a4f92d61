// ccs: constrained stochastic control solver CLI.
//
// Subcommands: solve | rate-study | qualify | simulate | certify.
// Exit codes: 0 success, 1 config error, 2 not converged / check failed,
// 3 CFL violation.

#include "ccs/commands.hpp"
#include "ccs/config.hpp"
#include "ccs/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"constrained stochastic control solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    bool full_range = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [outputs] dir)");
        sub->add_option("--threads", threads, "worker threads (default: CCS_THREADS or 1)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve the dual problem and certify");
    add_common(solve);
    CLI::App* rate = app.add_subcommand("rate-study", "convergence rate study over an h list");
    add_common(rate);
    rate->add_flag("--full-range", full_range, "use the full h range 2e-5..1e-2");
    CLI::App* qualify = app.add_subcommand("qualify", "run the qualification check");
    add_common(qualify);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo check of the optimal policy");
    add_common(simulate);
    CLI::App* certify = app.add_subcommand("certify", "optimality certificate for the solved pair");
    add_common(certify);

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        if (const char* env = std::getenv("CCS_THREADS")) threads = std::atoi(env);
    }
    ccs::set_thread_count(threads > 0 ? threads : 1);

    try {
        ccs::RunConfig cfg = ccs::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (full_range) cfg.full_range = true;

        if (solve->parsed()) return ccs::cmd_solve(cfg);
        if (rate->parsed()) return ccs::cmd_rate_study(cfg);
        if (qualify->parsed()) return ccs::cmd_qualify(cfg);
        if (simulate->parsed()) return ccs::cmd_simulate(cfg);
        if (certify->parsed()) return ccs::cmd_certify(cfg);
    } catch (const ccs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ccs::kExitConfig;
    } catch (const ccs::CflViolation& e) {
        std::cerr << e.what() << "\n";
        return ccs::kExitCfl;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ccs::kExitNotConverged;
    }
    return ccs::kExitConfig;
}
