// lcdual -- life-cycle dual solver CLI: solve / grid / policy / verify.
#include "lcdual/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

lcdual::RunConfig load(const std::string& config_path,
                       const std::vector<std::string>& overrides,
                       const std::string& output_dir_flag) {
    lcdual::RunConfig cfg = lcdual::load_config(config_path, overrides);
    if (const char* env = std::getenv("LCDUAL_OUTPUT_DIR"); env && *env)
        cfg.output_dir = env;
    if (!output_dir_flag.empty()) cfg.output_dir = output_dir_flag;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-method life-cycle solver: job choice, retirement timing, "
                 "consumption under a no-borrowing constraint"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--set", overrides,
                   "override a config field by dotted path, e.g. --set sim.seed=7");
    app.add_option("-o,--output-dir", output_dir, "output directory override");

    auto* solve = app.add_subcommand("solve", "solve thresholds and write solution.json");

    auto* grid = app.add_subcommand("grid", "write grid.csv with the value function "
                                            "and variational-inequality residuals");
    double z_min = 0.0, z_max = 0.0;
    int n_grid = 500;
    grid->add_option("--zmin", z_min, "lowest dual state (default z_R/10)");
    grid->add_option("--zmax", z_max, "highest dual state (default 10*z_B)");
    grid->add_option("-n,--points", n_grid, "number of log-spaced rows");

    auto* policy = app.add_subcommand("policy", "write policy.csv for wealth levels");
    std::vector<double> xs;
    bool with_pi = false;
    policy->add_option("-x,--wealth", xs, "wealth levels (repeatable)");
    policy->add_flag("--pi", with_pi, "append the heuristic hedge column");

    auto* verify = app.add_subcommand(
        "verify", "run the certification battery and write sim_report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        const lcdual::RunConfig cfg = load(config_path, overrides, output_dir);
        if (*solve) return lcdual::cmd_solve(cfg, std::cout);
        if (*grid) return lcdual::cmd_grid(cfg, z_min, z_max, n_grid, std::cout);
        if (*policy) return lcdual::cmd_policy(cfg, xs, with_pi, std::cout);
        if (*verify) return lcdual::cmd_verify(cfg, std::cout);
    } catch (const lcdual::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return lcdual::kExitValidation;
    } catch (const lcdual::VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return lcdual::kExitVerification;
    } catch (const lcdual::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return lcdual::kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lcdual::kExitSolver;
    }
    return lcdual::kExitOk;
}
